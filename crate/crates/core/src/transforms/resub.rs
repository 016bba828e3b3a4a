use rustc_hash::FxHashMap;

use super::recipe::RLit;
use super::{Candidate, Engine, OpCode, PlanDetail, Recipe, TransformPlan};
use crate::aig::{cone_nodes, reconvergent_cut, Aig, Lit, NodeId};
use crate::truth::TruthTable;

impl Engine {
    /// Re-expresses the root with existing divisors: first as a single
    /// divisor (possibly complemented), then as an AND/OR of two.
    pub fn try_resub(&mut self, aig: &mut Aig, root: NodeId) -> Option<TransformPlan> {
        let leaves = reconvergent_cut(aig, root, self.opts.rs_leaf_limit);
        let n = leaves.len();
        let cone = cone_nodes(aig, root, &leaves).expect("reconvergent cuts dominate their root");
        let doomed = aig.mffc(root, &leaves);

        let mut tables: FxHashMap<NodeId, TruthTable> = FxHashMap::default();
        tables.insert(0, TruthTable::zero(n));
        for (i, &l) in leaves.iter().enumerate() {
            tables.insert(l, TruthTable::var(n, i));
        }
        let lit_table = |tables: &FxHashMap<NodeId, TruthTable>, l: Lit| {
            let t = &tables[&l.node()];
            if l.is_complemented() {
                !t
            } else {
                t.clone()
            }
        };
        for &id in &cone {
            let (a, b) = aig.fanins(id);
            let t = &lit_table(&tables, a) & &lit_table(&tables, b);
            tables.insert(id, t);
        }
        let target = tables[&root].clone();

        // Divisors: window leaves, shared cone logic, then side nodes built
        // purely from divisors.
        let mut divs: Vec<NodeId> = leaves.clone();
        divs.extend(cone.iter().copied().filter(|&id| id != root && !doomed.contains(&id)));
        divs.truncate(self.opts.rs_divisor_cap);
        let mut k = 0;
        while k < divs.len() && divs.len() < self.opts.rs_divisor_cap {
            let mut fos: Vec<NodeId> = aig.fanouts(divs[k]).to_vec();
            fos.sort_unstable();
            fos.dedup();
            for f in fos {
                if divs.len() >= self.opts.rs_divisor_cap {
                    break;
                }
                if f == root || divs.contains(&f) || doomed.contains(&f) || !aig.is_alive(f) {
                    continue;
                }
                let (a, b) = aig.fanins(f);
                let known = |x: Lit| x.node() == 0 || divs.contains(&x.node());
                if known(a) && known(b) {
                    let t = &lit_table(&tables, a) & &lit_table(&tables, b);
                    tables.insert(f, t);
                    divs.push(f);
                }
            }
            k += 1;
        }

        let mut zero = Vec::new();
        if target.is_zero() || target.is_one() {
            zero.push(Recipe::constant(target.is_one()));
        }
        let neg_target = !&target;
        for &d in &divs {
            let t = &tables[&d];
            if *t == target {
                zero.push(Recipe::wire(Lit::positive(d)));
            } else if *t == neg_target {
                zero.push(Recipe::wire(!Lit::positive(d)));
            }
        }
        let plan = self.evaluate(aig, root, &doomed, zero);
        if plan.is_some() {
            return plan;
        }

        // 1-resub: target (or its complement) as an AND of two divisor literals.
        let mut one = Vec::new();
        let polar: Vec<[TruthTable; 2]> = divs.iter().map(|d| [tables[d].clone(), !&tables[d]]).collect();
        for i in 0..divs.len() {
            for j in i + 1..divs.len() {
                for pi in 0..2 {
                    let ti = &polar[i][pi];
                    // Quick filter: an AND implies both operands.
                    let pos_ok = target.implies(ti);
                    let neg_ok = neg_target.implies(ti);
                    if !pos_ok && !neg_ok {
                        continue;
                    }
                    for (pj, pol) in polar[j].iter().enumerate() {
                        let prod = ti & pol;
                        let out_neg = if pos_ok && prod == target {
                            false
                        } else if neg_ok && prod == neg_target {
                            true
                        } else {
                            continue;
                        };
                        one.push(Recipe {
                            inputs: vec![Lit::positive(divs[i]) ^ (pi == 1), Lit::positive(divs[j]) ^ (pj == 1)],
                            gates: vec![(RLit::new(1, false), RLit::new(2, false))],
                            output: RLit::new(3, out_neg),
                        });
                    }
                }
            }
        }
        self.evaluate(aig, root, &doomed, one)
    }

    fn evaluate(
        &self,
        aig: &mut Aig,
        root: NodeId,
        doomed: &[NodeId],
        recipes: Vec<Recipe>,
    ) -> Option<TransformPlan> {
        let mut cands = Vec::new();
        for recipe in recipes {
            let Some(added) = recipe.count_added(aig, root, doomed) else { continue };
            let mut key: Vec<NodeId> = recipe.inputs.iter().map(|l| l.node()).collect();
            key.sort_unstable();
            cands.push(Candidate {
                estimate: doomed.len() as i64 - added as i64,
                detail: PlanDetail::Resub { divisors: recipe.inputs.clone() },
                recipe,
                leaves: key,
            });
        }
        self.choose(aig, root, OpCode::Rs, cands)
    }
}
