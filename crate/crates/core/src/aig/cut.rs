//! K-feasible cut enumeration by bottom-up merging, and cut truth tables.

use arrayvec::ArrayVec;

use super::{Aig, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::truth::{var_word, word_mask, TruthTable};

pub const MAX_CUT_SIZE: usize = 8;

pub type CutLeaves = ArrayVec<NodeId, MAX_CUT_SIZE>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub root: NodeId,
    /// Sorted ascending; leaf `i` is truth-table variable `i`.
    pub leaves: CutLeaves,
    pub truth: TruthTable,
}

#[inline]
fn signature(leaves: &[NodeId]) -> u64 {
    leaves.iter().fold(0, |s, &l| s | 1u64 << (l % 64))
}

/// Union of two sorted leaf sets, or `None` if it exceeds `k` leaves.
fn merge(a: &[NodeId], b: &[NodeId], k: usize) -> Option<CutLeaves> {
    let mut out = CutLeaves::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] < b[j]) {
            i += 1;
            a[i - 1]
        } else if i == a.len() || b[j] < a[i] {
            j += 1;
            b[j - 1]
        } else {
            i += 1;
            j += 1;
            a[i - 1]
        };
        if out.len() == k {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

fn is_subset(small: &[NodeId], big: &[NodeId]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Per-node cut sets, computed on demand and invalidated as the graph changes.
#[derive(Clone, Debug)]
pub struct CutCache {
    k: usize,
    max_cuts: usize,
    sets: Vec<Option<Vec<CutLeaves>>>,
}

impl CutCache {
    pub fn new(k: usize, max_cuts: usize) -> Result<Self> {
        if !(2..=MAX_CUT_SIZE).contains(&k) {
            return Err(Error::config(format!("cut size K={k} outside 2..={MAX_CUT_SIZE}")));
        }
        if max_cuts < 1 {
            return Err(Error::config("max_cuts must be at least 1"));
        }
        Ok(CutCache { k, max_cuts, sets: Vec::new() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Drops cached cuts of the touched nodes and of everything above them.
    pub fn invalidate(&mut self, aig: &Aig, touched: &[NodeId]) {
        let mut stack: Vec<NodeId> = touched.to_vec();
        while let Some(id) = stack.pop() {
            let Some(slot) = self.sets.get_mut(id as usize) else { continue };
            if slot.take().is_none() {
                continue;
            }
            if (id as usize) < aig.num_slots() {
                stack.extend_from_slice(aig.fanouts(id));
            }
        }
    }

    /// Catches up with the graph's mutation log and returns the cuts of `id`:
    /// the trivial cut first, then up to `max_cuts - 1` others ordered by
    /// size and then leaf indices.
    pub fn cuts(&mut self, aig: &mut Aig, id: NodeId) -> &[CutLeaves] {
        let touched = aig.drain_touched();
        self.invalidate(aig, &touched);
        self.cuts_of(aig, id)
    }

    /// Like [`CutCache::cuts`] but for a graph whose mutation log the caller
    /// already consumed.
    pub fn cuts_of(&mut self, aig: &Aig, id: NodeId) -> &[CutLeaves] {
        if self.sets.len() < aig.num_slots() {
            self.sets.resize(aig.num_slots(), None);
        }
        let mut stack = vec![id];
        while let Some(&v) = stack.last() {
            if self.sets[v as usize].is_some() {
                stack.pop();
                continue;
            }
            match aig.kind(v) {
                NodeKind::Const => {
                    self.sets[v as usize] = Some(vec![CutLeaves::new()]);
                    stack.pop();
                }
                NodeKind::Input => {
                    self.sets[v as usize] = Some(vec![trivial(v)]);
                    stack.pop();
                }
                NodeKind::And => {
                    let (a, b) = aig.fanins(v);
                    let (a, b) = (a.node(), b.node());
                    let mut pending = false;
                    for f in [a, b] {
                        if self.sets[f as usize].is_none() {
                            stack.push(f);
                            pending = true;
                        }
                    }
                    if pending {
                        continue;
                    }
                    stack.pop();
                    let set = self.merge_node(v, a, b);
                    self.sets[v as usize] = Some(set);
                }
            }
        }
        self.sets[id as usize].as_deref().unwrap()
    }

    fn merge_node(&self, v: NodeId, a: NodeId, b: NodeId) -> Vec<CutLeaves> {
        let ca = self.sets[a as usize].as_ref().unwrap();
        let cb = self.sets[b as usize].as_ref().unwrap();
        let mut found: Vec<(u64, CutLeaves)> = Vec::new();
        for x in ca {
            for y in cb {
                let Some(m) = merge(x, y, self.k) else { continue };
                let sig = signature(&m);
                let dominated = found
                    .iter()
                    .any(|(s, c)| s & !sig == 0 && c.len() <= m.len() && is_subset(c, &m));
                if dominated {
                    continue;
                }
                found.retain(|(s, c)| !(sig & !s == 0 && m.len() <= c.len() && is_subset(&m, c)));
                found.push((sig, m));
            }
        }
        let mut cuts: Vec<CutLeaves> = found.into_iter().map(|(_, c)| c).collect();
        cuts.retain(|c| c.as_slice() != [v]);
        cuts.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        cuts.truncate(self.max_cuts - 1);
        cuts.insert(0, trivial(v));
        cuts
    }
}

fn trivial(v: NodeId) -> CutLeaves {
    let mut c = CutLeaves::new();
    c.push(v);
    c
}

/// All cuts of `node` with their truth tables (see [`CutCache::cuts`]).
pub fn enumerate_cuts(aig: &Aig, node: NodeId, k: usize, max_cuts: usize) -> Result<Vec<Cut>> {
    let mut cache = CutCache::new(k, max_cuts)?;
    let sets = cache.cuts_of(aig, node).to_vec();
    sets.into_iter()
        .map(|leaves| {
            let truth = cut_truth_table(aig, node, &leaves)?;
            Ok(Cut { root: node, leaves, truth })
        })
        .collect()
}

/// Function of `root` over `leaves` (leaf `i` is variable `i`), by forward
/// evaluation of the cone between them.
pub fn cut_truth_table(aig: &Aig, root: NodeId, leaves: &[NodeId]) -> Result<TruthTable> {
    let n = leaves.len();
    if n <= 6 {
        return cut_truth_word(aig, root, leaves).map(|w| TruthTable::from_word(n, w));
    }
    let mut vals: Vec<(NodeId, TruthTable)> =
        leaves.iter().enumerate().map(|(i, &l)| (l, TruthTable::var(n, i))).collect();
    let order = super::window::cone_nodes_checked(aig, root, leaves)?;
    for id in order {
        let (a, b) = aig.fanins(id);
        let get = |l: super::Lit, vals: &[(NodeId, TruthTable)]| -> TruthTable {
            let t = if l.node() == 0 {
                TruthTable::zero(n)
            } else {
                vals.iter().find(|(v, _)| *v == l.node()).unwrap().1.clone()
            };
            if l.is_complemented() {
                !t
            } else {
                t
            }
        };
        let t = &get(a, &vals) & &get(b, &vals);
        vals.push((id, t));
    }
    if root == 0 {
        return Ok(TruthTable::zero(n));
    }
    Ok(vals.into_iter().rev().find(|(v, _)| *v == root).unwrap().1)
}

/// Single-word version of [`cut_truth_table`] for at most 6 leaves.
pub(crate) fn cut_truth_word(aig: &Aig, root: NodeId, leaves: &[NodeId]) -> Result<u64> {
    let n = leaves.len();
    debug_assert!(n <= 6);
    if let Some(i) = leaves.iter().position(|&l| l == root) {
        return Ok(var_word(i) & word_mask(n));
    }
    if root == 0 {
        return Ok(0);
    }
    let order = super::window::cone_nodes_checked(aig, root, leaves)?;
    let mut vals: Vec<(NodeId, u64)> = leaves.iter().enumerate().map(|(i, &l)| (l, var_word(i))).collect();
    vals.push((0, 0));
    for id in order {
        let (a, b) = aig.fanins(id);
        let get = |l: super::Lit| {
            let w = vals.iter().find(|(v, _)| *v == l.node()).unwrap().1;
            if l.is_complemented() {
                !w
            } else {
                w
            }
        };
        let w = get(a) & get(b);
        vals.push((id, w));
    }
    Ok(vals.last().unwrap().1 & word_mask(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_has_only_trivial_cut() {
        let mut g = Aig::new();
        let a = g.add_input();
        let cuts = enumerate_cuts(&g, a.node(), 4, 8).unwrap();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].leaves.as_slice(), &[a.node()]);
        assert_eq!(cuts[0].truth.word(), 0b10);
    }

    #[test]
    fn and_of_two_inputs() {
        let mut g = Aig::new();
        let a = g.add_input();
        let b = g.add_input();
        let x = g.make_and(a, b);
        let cuts = enumerate_cuts(&g, x.node(), 4, 8).unwrap();
        let leaves: Vec<Vec<NodeId>> = cuts.iter().map(|c| c.leaves.to_vec()).collect();
        assert_eq!(leaves, vec![vec![x.node()], vec![a.node(), b.node()]]);
        assert_eq!(cuts[1].truth.word(), 0b1000);
    }

    #[test]
    fn k_out_of_range() {
        let g = Aig::new();
        assert!(enumerate_cuts(&g, 0, 1, 8).is_err());
        assert!(enumerate_cuts(&g, 0, 9, 8).is_err());
    }

    #[test]
    fn truth_over_non_dominating_leaves_fails() {
        let mut g = Aig::new();
        let a = g.add_input();
        let b = g.add_input();
        let x = g.make_and(a, !b);
        assert!(cut_truth_table(&g, x.node(), &[a.node()]).is_err());
        let t = cut_truth_table(&g, x.node(), &[a.node(), b.node()]).unwrap();
        assert_eq!(t.word(), 0b0010);
    }
}
