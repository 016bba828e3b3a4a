//! Replacement logic shared by all transforms: a small gate list over a set of
//! existing graph literals, rebuilt in the graph through structural hashing.

use std::fmt;
use std::ops::Not;

use crate::aig::{Aig, Lit, NodeId};

/// Literal inside a [`Recipe`]: index 0 is the constant, `1..=inputs` the
/// recipe inputs, and the gates follow in order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RLit(u32);

impl RLit {
    pub const FALSE: RLit = RLit(0);
    pub const TRUE: RLit = RLit(1);

    pub fn new(index: usize, complemented: bool) -> RLit {
        RLit((index as u32) << 1 | complemented as u32)
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }
}

impl Not for RLit {
    type Output = RLit;

    fn not(self) -> RLit {
        RLit(self.0 ^ 1)
    }
}

impl std::ops::BitXor<bool> for RLit {
    type Output = RLit;

    fn bitxor(self, rhs: bool) -> RLit {
        RLit(self.0 ^ rhs as u32)
    }
}

impl fmt::Debug for RLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = if self.is_complemented() { "!" } else { "" };
        write!(f, "{neg}r{}", self.index())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub inputs: Vec<Lit>,
    pub gates: Vec<(RLit, RLit)>,
    pub output: RLit,
}

impl Recipe {
    /// A recipe that just forwards one existing literal.
    pub fn wire(lit: Lit) -> Recipe {
        Recipe { inputs: vec![lit], gates: Vec::new(), output: RLit::new(1, false) }
    }

    pub fn constant(value: bool) -> Recipe {
        Recipe { inputs: Vec::new(), gates: Vec::new(), output: RLit::FALSE ^ value }
    }

    fn resolve(&self, built: &[Option<Lit>], l: RLit) -> Option<Lit> {
        let i = l.index();
        let base = if i == 0 {
            Some(Lit::FALSE)
        } else if i <= self.inputs.len() {
            Some(self.inputs[i - 1])
        } else {
            built[i - 1 - self.inputs.len()]
        };
        base.map(|b| b ^ l.is_complemented())
    }

    /// Number of AND nodes building this recipe would add, counting reuse of
    /// a node in `doomed` (logic that dies with the root) as an addition.
    /// `None` if the recipe would pass through `root` itself.
    pub fn count_added(&self, aig: &Aig, root: NodeId, doomed: &[NodeId]) -> Option<usize> {
        let mut built: Vec<Option<Lit>> = Vec::with_capacity(self.gates.len());
        let mut added = 0;
        let mut reused: Vec<NodeId> = Vec::new();
        for &(a, b) in &self.gates {
            let r = match (self.resolve(&built, a), self.resolve(&built, b)) {
                (Some(x), Some(y)) => aig.lookup_and(x, y),
                _ => None,
            };
            match r {
                Some(l) => {
                    if l.node() == root {
                        return None;
                    }
                    if doomed.contains(&l.node()) && !reused.contains(&l.node()) {
                        reused.push(l.node());
                        added += 1;
                    }
                }
                None => added += 1,
            }
            built.push(r);
        }
        if let Some(out) = self.resolve(&built, self.output) {
            if out.node() == root {
                return None;
            }
        }
        Some(added)
    }

    /// Builds the recipe with `make_and`. Returns `None` (with whatever was
    /// built left in place) if an intermediate gate resolves to `root`.
    pub fn build(&self, aig: &mut Aig, root: NodeId) -> Option<Lit> {
        let mut built: Vec<Option<Lit>> = Vec::with_capacity(self.gates.len());
        for (k, &(a, b)) in self.gates.iter().enumerate() {
            let x = self.resolve(&built, a).unwrap();
            let y = self.resolve(&built, b).unwrap();
            let l = aig.make_and(x, y);
            if l.node() == root && k + 1 < self.gates.len() {
                return None;
            }
            built.push(Some(l));
        }
        self.resolve(&built, self.output)
    }

    /// Truth table of the recipe over its inputs (at most 6).
    pub fn eval_word(&self, input_words: &[u64]) -> u64 {
        let mut vals: Vec<u64> = Vec::with_capacity(1 + self.inputs.len() + self.gates.len());
        vals.push(0);
        vals.extend_from_slice(input_words);
        let get = |l: RLit, vals: &[u64]| {
            let v = vals[l.index()];
            if l.is_complemented() {
                !v
            } else {
                v
            }
        };
        for &(a, b) in &self.gates {
            let v = get(a, &vals) & get(b, &vals);
            vals.push(v);
        }
        get(self.output, &vals)
    }
}
