//! Bit-parallel simulation and simulation-based equivalence checking.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Aig, Lit, NodeId};
use crate::error::{Error, Result};
use crate::truth::var_word;

/// Largest input count for which exhaustive checking is allowed.
pub const EXHAUSTIVE_PI_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceMode {
    Exhaustive,
    Random { words: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// Input assignment (one bit per input) on which some output differs.
    Counterexample(Vec<bool>),
    /// Random simulation found no difference; this is not a proof.
    Inconclusive,
}

/// Reusable evaluator: topological order computed once, one word per node.
pub(crate) struct Simulator {
    order: Vec<NodeId>,
    vals: Vec<u64>,
}

impl Simulator {
    pub(crate) fn new(aig: &Aig) -> Self {
        let order = aig.topological_order().into_iter().filter(|&id| aig.is_and(id)).collect();
        Simulator { order, vals: vec![0; aig.num_slots()] }
    }

    pub(crate) fn run(&mut self, aig: &Aig, inputs: &[u64]) {
        self.vals[0] = 0;
        for (&id, &w) in aig.inputs().iter().zip(inputs) {
            self.vals[id as usize] = w;
        }
        for &id in &self.order {
            let (a, b) = aig.fanins(id);
            self.vals[id as usize] = self.lit(a) & self.lit(b);
        }
    }

    #[inline]
    pub(crate) fn lit(&self, l: Lit) -> u64 {
        let w = self.vals[l.node() as usize];
        if l.is_complemented() {
            !w
        } else {
            w
        }
    }

}

/// Evaluates 64 patterns at once: one word per input, one word per output.
pub fn simulate(aig: &Aig, input_words: &[u64]) -> Result<Vec<u64>> {
    if input_words.len() != aig.num_inputs() {
        return Err(Error::shape(format!(
            "{} input words for {} inputs",
            input_words.len(),
            aig.num_inputs()
        )));
    }
    let mut sim = Simulator::new(aig);
    sim.run(aig, input_words);
    Ok(aig.outputs().iter().map(|&o| sim.lit(o)).collect())
}

/// Input words for word `w` of the exhaustive enumeration of `n` inputs.
pub(crate) fn exhaustive_words(n: usize, w: usize) -> Vec<u64> {
    (0..n)
        .map(|i| {
            if i < 6 {
                var_word(i)
            } else if w >> (i - 6) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect()
}

/// Compares outputs position by position.
pub fn check_equivalence(a: &Aig, b: &Aig, mode: EquivalenceMode) -> Result<Verdict> {
    if a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() {
        return Err(Error::Equivalence(format!(
            "interface mismatch: {}/{} vs {}/{} inputs/outputs",
            a.num_inputs(),
            a.num_outputs(),
            b.num_inputs(),
            b.num_outputs()
        )));
    }
    let n = a.num_inputs();
    let mut sa = Simulator::new(a);
    let mut sb = Simulator::new(b);
    let mut compare = |inputs: &[u64], valid: u64| -> Option<Vec<bool>> {
        sa.run(a, inputs);
        sb.run(b, inputs);
        for (&oa, &ob) in a.outputs().iter().zip(b.outputs()) {
            let diff = (sa.lit(oa) ^ sb.lit(ob)) & valid;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return Some(inputs.iter().map(|w| w >> bit & 1 == 1).collect());
            }
        }
        None
    };
    match mode {
        EquivalenceMode::Exhaustive => {
            if n > EXHAUSTIVE_PI_LIMIT {
                return Err(Error::Equivalence(format!(
                    "exhaustive check needs at most {EXHAUSTIVE_PI_LIMIT} inputs, design has {n}"
                )));
            }
            let valid = if n >= 6 { !0 } else { (1u64 << (1 << n)) - 1 };
            let words = if n > 6 { 1usize << (n - 6) } else { 1 };
            for w in 0..words {
                if let Some(cex) = compare(&exhaustive_words(n, w), valid) {
                    return Ok(Verdict::Counterexample(cex));
                }
            }
            Ok(Verdict::Equivalent)
        }
        EquivalenceMode::Random { words, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..words {
                let inputs: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
                if let Some(cex) = compare(&inputs, !0) {
                    return Ok(Verdict::Counterexample(cex));
                }
            }
            Ok(Verdict::Inconclusive)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passthrough_and_contradiction() {
        let mut g = Aig::new();
        let a = g.add_input();
        g.add_output(a);
        let x = g.add_and_raw(a, !a);
        g.add_output(x);
        let out = simulate(&g, &[0xDEAD_BEEF]).unwrap();
        assert_eq!(out, vec![0xDEAD_BEEF, 0]);
    }

    #[test]
    fn complemented_output_found_in_first_word() {
        let mut g = Aig::new();
        let a = g.add_input();
        let b = g.add_input();
        let x = g.make_and(a, b);
        g.add_output(x);
        let mut h = g.clone();
        assert_eq!(check_equivalence(&g, &h, EquivalenceMode::Exhaustive).unwrap(), Verdict::Equivalent);
        h = {
            let mut k = Aig::new();
            let a = k.add_input();
            let b = k.add_input();
            let x = k.make_and(a, b);
            k.add_output(!x);
            k
        };
        let v = check_equivalence(&g, &h, EquivalenceMode::Random { words: 1, seed: 3 }).unwrap();
        assert!(matches!(v, Verdict::Counterexample(_)));
        let v = check_equivalence(&g, &g, EquivalenceMode::Random { words: 4, seed: 3 }).unwrap();
        assert_eq!(v, Verdict::Inconclusive);
    }

    #[test]
    fn exhaustive_limit() {
        let mut g = Aig::new();
        for _ in 0..21 {
            g.add_input();
        }
        assert!(check_equivalence(&g, &g, EquivalenceMode::Exhaustive).is_err());
    }
}
