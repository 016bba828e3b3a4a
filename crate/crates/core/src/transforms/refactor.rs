use super::factor::{expr_to_recipe, factor, Expr};
use super::sop::{irredundant_cover, Cube};
use super::{Candidate, Engine, OpCode, PlanDetail, TransformPlan};
use crate::aig::{cut_truth_table, reconvergent_cut, Aig, Lit, NodeId};

/// Factored form of the function, or of its complement when that is smaller.
/// The flag reports whether the complement was chosen.
pub(crate) fn best_factored_form(f: &crate::truth::TruthTable) -> (Expr, bool) {
    let lits = |c: &[Cube]| c.iter().map(Cube::literal_set).collect::<Vec<u32>>();
    let pos = factor(&lits(&irredundant_cover(f)));
    let neg = factor(&lits(&irredundant_cover(&!f)));
    if neg.num_literals() < pos.num_literals() {
        (neg, true)
    } else {
        (pos, false)
    }
}

impl Engine {
    /// Replaces the cone of a large reconvergence-driven cut with a factored
    /// form of the cut function.
    pub fn try_refactor(&mut self, aig: &mut Aig, root: NodeId) -> Option<TransformPlan> {
        let leaves = reconvergent_cut(aig, root, self.opts.rf_leaf_limit);
        let tt = cut_truth_table(aig, root, &leaves).expect("reconvergent cuts dominate their root");
        let (expr, complement) = best_factored_form(&tt);
        let inputs: Vec<Lit> = leaves.iter().map(|&l| Lit::positive(l)).collect();
        let recipe = expr_to_recipe(&expr, &inputs, complement);
        let doomed = aig.mffc(root, &leaves);
        let added = recipe.count_added(aig, root, &doomed)?;
        let form = if complement { format!("!({expr})") } else { expr.to_string() };
        let cand = Candidate {
            estimate: doomed.len() as i64 - added as i64,
            detail: PlanDetail::Refactor { leaves: leaves.clone(), form },
            recipe,
            leaves,
        };
        self.choose(aig, root, OpCode::Rf, vec![cand])
    }
}
