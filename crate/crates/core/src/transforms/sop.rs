//! Two-level covers of completely specified functions: all prime implicants
//! by a ternary dynamic program, then a greedy cover with essential primes
//! first and a final redundancy sweep.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::truth::TruthTable;

/// Largest variable count accepted by [`irredundant_cover`].
pub const MAX_SOP_VARS: usize = 12;

/// Product term: variable `i` appears iff bit `i` of `mask` is set, positive
/// iff bit `i` of `bits` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub mask: u16,
    pub bits: u16,
}

impl Cube {
    pub fn num_literals(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Literal set encoding used by factoring: bit `2i` for `x_i`, `2i+1` for `!x_i`.
    pub fn literal_set(&self) -> u32 {
        let mut s = 0u32;
        for i in 0..16 {
            if self.mask >> i & 1 == 1 {
                s |= 1 << (2 * i + (self.bits >> i & 1 ^ 1) as u32);
            }
        }
        s
    }

    pub fn contains(&self, m: usize) -> bool {
        (m as u16 ^ self.bits) & self.mask == 0
    }

    pub fn table(&self, vars: usize) -> TruthTable {
        let mut t = TruthTable::one(vars);
        for i in 0..vars {
            if self.mask >> i & 1 == 1 {
                let v = TruthTable::var(vars, i);
                t = if self.bits >> i & 1 == 1 { &t & &v } else { &t & &!&v };
            }
        }
        t
    }
}

/// All prime implicants of `f`, in ascending ternary index order.
pub fn prime_implicants(f: &TruthTable) -> Vec<Cube> {
    let n = f.vars();
    assert!(n <= MAX_SOP_VARS);
    let pow: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
    let total = pow[n];
    let mut imp = vec![false; total];
    for t in 0..total {
        let mut x = t;
        let mut dc = None;
        let mut m = 0usize;
        for i in 0..n {
            let d = x % 3;
            x /= 3;
            if d == 2 {
                dc = Some(i);
                break;
            }
            m |= d << i;
        }
        imp[t] = match dc {
            Some(p) => imp[t - 2 * pow[p]] && imp[t - pow[p]],
            None => f.get(m),
        };
    }
    let mut primes = Vec::new();
    for t in 0..total {
        if !imp[t] {
            continue;
        }
        let mut x = t;
        let mut prime = true;
        let mut cube = Cube { mask: 0, bits: 0 };
        for i in 0..n {
            let d = x % 3;
            x /= 3;
            if d == 2 {
                continue;
            }
            cube.mask |= 1 << i;
            cube.bits |= (d as u16) << i;
            if imp[t + (2 - d) * pow[i]] {
                prime = false;
                break;
            }
        }
        if prime {
            primes.push(cube);
        }
    }
    primes
}

fn cover_uncached(f: &TruthTable) -> Vec<Cube> {
    let n = f.vars();
    if f.is_zero() {
        return Vec::new();
    }
    let primes = prime_implicants(f);
    let tables: Vec<TruthTable> = primes.iter().map(|c| c.table(n)).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut uncovered = f.clone();

    // Essential primes: sole cover of some minterm.
    for m in 0..1usize << n {
        if !f.get(m) || !uncovered.get(m) {
            continue;
        }
        let mut only = None;
        let mut count = 0;
        for (k, c) in primes.iter().enumerate() {
            if c.contains(m) {
                count += 1;
                only = Some(k);
                if count > 1 {
                    break;
                }
            }
        }
        if count == 1 {
            let k = only.unwrap();
            chosen.push(k);
            uncovered = &uncovered & &!&tables[k];
        }
    }

    while !uncovered.is_zero() {
        let mut best: Option<(u32, u32, usize)> = None;
        for (k, t) in tables.iter().enumerate() {
            let gain = (t & &uncovered).count_ones();
            if gain == 0 {
                continue;
            }
            let lits = primes[k].num_literals();
            let better = match best {
                None => true,
                Some((g, l, _)) => gain > g || (gain == g && lits < l),
            };
            if better {
                best = Some((gain, lits, k));
            }
        }
        let (_, _, k) = best.expect("primes cover the onset");
        chosen.push(k);
        uncovered = &uncovered & &!&tables[k];
    }

    // Drop cubes covered by the rest, largest first.
    let mut order = chosen.clone();
    order.sort_by_key(|&k| std::cmp::Reverse(primes[k].num_literals()));
    let mut keep: Vec<usize> = chosen.clone();
    for k in order {
        let rest: Vec<usize> = keep.iter().copied().filter(|&j| j != k).collect();
        let mut union = TruthTable::zero(n);
        for &j in &rest {
            union = &union | &tables[j];
        }
        if tables[k].implies(&union) {
            keep = rest;
        }
    }
    let mut cubes: Vec<Cube> = keep.into_iter().map(|k| primes[k]).collect();
    cubes.sort();
    cubes
}

/// Irredundant prime cover of `f`. Results are memoized process-wide since
/// the same cut functions recur across many traversals of one design.
pub fn irredundant_cover(f: &TruthTable) -> Arc<Vec<Cube>> {
    static CACHE: OnceLock<Mutex<HashMap<TruthTable, Arc<Vec<Cube>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(f) {
        return c.clone();
    }
    let cover = Arc::new(cover_uncached(f));
    let mut guard = cache.lock().unwrap();
    if guard.len() > 200_000 {
        guard.clear();
    }
    guard.insert(f.clone(), cover.clone());
    cover
}

pub fn cover_table(cubes: &[Cube], vars: usize) -> TruthTable {
    cubes.iter().fold(TruthTable::zero(vars), |acc, c| &acc | &c.table(vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xor_primes_are_minterms() {
        let f = TruthTable::from_word(2, 0b0110);
        let p = prime_implicants(&f);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|c| c.num_literals() == 2));
    }

    #[test]
    fn consensus_term_is_redundant() {
        // f = ab + !ac has prime bc as well; the cover omits it.
        let f = TruthTable::from_fn(3, |m| {
            let (a, b, c) = (m & 1 == 1, m & 2 == 2, m & 4 == 4);
            (a && b) || (!a && c)
        });
        assert_eq!(prime_implicants(&f).len(), 3);
        assert_eq!(irredundant_cover(&f).len(), 2);
    }

    proptest! {
        #[test]
        fn cover_is_exact_and_irredundant(vars in 1usize..8, seed in any::<u64>()) {
            let f = TruthTable::from_fn(vars, |m| (seed.wrapping_mul(m as u64 + 1).wrapping_add(seed >> 7)) >> 13 & 1 == 1);
            let cover = irredundant_cover(&f);
            prop_assert_eq!(cover_table(&cover, vars), f.clone());
            for k in 0..cover.len() {
                let rest: Vec<Cube> = cover.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, c)| *c).collect();
                prop_assert_ne!(cover_table(&rest, vars), f.clone());
            }
            let primes = prime_implicants(&f);
            for c in cover.iter() {
                prop_assert!(primes.contains(c));
            }
        }
    }
}
