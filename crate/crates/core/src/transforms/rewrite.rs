use super::library::Library;
use super::npn::{extend_to_4, NpnTable};
use super::{Candidate, Engine, PlanDetail, Recipe, TransformPlan};
use crate::aig::{cut_truth_word, Aig, Lit, NodeId};
use crate::transforms::OpCode;

impl Engine {
    /// Replaces the cone of some 4-feasible cut with the library structure
    /// of the cut function's NPN class.
    pub fn try_rewrite(&mut self, aig: &mut Aig, root: NodeId) -> Option<TransformPlan> {
        let cuts: Vec<Vec<NodeId>> = self.cuts.cuts(aig, root).iter().skip(1).map(|c| c.to_vec()).collect();
        let npn = NpnTable::get();
        let lib = Library::get();
        let mut cands = Vec::new();
        for leaves in cuts {
            if leaves.len() > 4 {
                continue;
            }
            let word = cut_truth_word(aig, root, &leaves).expect("enumerated cuts dominate their root");
            let f = extend_to_4(word, leaves.len());
            let (class, t) = npn.canonize(f);
            let entry = lib.entry(class);
            let inputs: Vec<Lit> = (0..4)
                .map(|j| {
                    let src = t.perm[j] as usize;
                    if src < leaves.len() {
                        Lit::positive(leaves[src]) ^ (t.neg >> j & 1 == 1)
                    } else {
                        Lit::FALSE
                    }
                })
                .collect();
            let recipe = Recipe { inputs, gates: entry.gates.clone(), output: entry.output ^ t.out_neg };
            let doomed = aig.mffc(root, &leaves);
            let Some(added) = recipe.count_added(aig, root, &doomed) else { continue };
            cands.push(Candidate {
                estimate: doomed.len() as i64 - added as i64,
                detail: PlanDetail::Rewrite { leaves: leaves.clone(), class, library_size: entry.size() },
                recipe,
                leaves,
            });
        }
        self.choose(aig, root, OpCode::Rw, cands)
    }
}
