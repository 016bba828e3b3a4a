//! Truth tables over up to 16 variables, stored as little-endian bit vectors
//! (bit `m` is the function value on the minterm whose variable `i` equals
//! bit `i` of `m`).

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

pub const MAX_VARS: usize = 16;

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Pattern of variable `i` (< 6) inside one 64-bit word.
#[inline]
pub fn var_word(i: usize) -> u64 {
    VAR_MASKS[i]
}

/// Mask of the meaningful bits of a single-word table over `vars` variables.
#[inline]
pub fn word_mask(vars: usize) -> u64 {
    if vars >= 6 {
        !0
    } else {
        (1u64 << (1 << vars)) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    vars: usize,
    words: Vec<u64>,
}

impl TruthTable {
    fn n_words(vars: usize) -> usize {
        if vars <= 6 {
            1
        } else {
            1 << (vars - 6)
        }
    }

    pub fn zero(vars: usize) -> Self {
        assert!(vars <= MAX_VARS, "at most {MAX_VARS} variables");
        TruthTable { vars, words: vec![0; Self::n_words(vars)] }
    }

    pub fn one(vars: usize) -> Self {
        let mut t = Self::zero(vars);
        t.words.iter_mut().for_each(|w| *w = !0);
        t.mask();
        t
    }

    /// The projection onto variable `i`.
    pub fn var(vars: usize, i: usize) -> Self {
        assert!(i < vars);
        let mut t = Self::zero(vars);
        if i < 6 {
            t.words.iter_mut().for_each(|w| *w = VAR_MASKS[i]);
        } else {
            let stride = 1 << (i - 6);
            for (k, w) in t.words.iter_mut().enumerate() {
                if k & stride != 0 {
                    *w = !0;
                }
            }
        }
        t.mask();
        t
    }

    /// Table over at most 6 variables from its raw word (extra bits ignored).
    pub fn from_word(vars: usize, word: u64) -> Self {
        assert!(vars <= 6);
        TruthTable { vars, words: vec![word & word_mask(vars)] }
    }

    pub fn from_words(vars: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), Self::n_words(vars));
        let mut t = TruthTable { vars, words };
        t.mask();
        t
    }

    pub fn from_fn(vars: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut t = Self::zero(vars);
        for m in 0..1usize << vars {
            if f(m) {
                t.set(m, true);
            }
        }
        t
    }

    fn mask(&mut self) {
        if self.vars < 6 {
            self.words[0] &= word_mask(self.vars);
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The single word of a table over at most 6 variables.
    pub fn word(&self) -> u64 {
        assert!(self.vars <= 6);
        self.words[0]
    }

    pub fn num_bits(&self) -> usize {
        1 << self.vars
    }

    #[inline]
    pub fn get(&self, m: usize) -> bool {
        self.words[m >> 6] >> (m & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, m: usize, v: bool) {
        let bit = 1u64 << (m & 63);
        if v {
            self.words[m >> 6] |= bit;
        } else {
            self.words[m >> 6] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.vars)
    }

    /// Whether the function changes with variable `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        let v = Self::var(self.vars, i);
        let pos = self & &v;
        let neg = self & &!&v;
        // Shift the positive half onto the negative half and compare.
        (0..self.num_bits()).filter(|m| m >> i & 1 == 0).any(|m| neg.get(m) != pos.get(m | 1 << i))
    }

    /// Whether `self` implies `other` (every onset minterm of self is in other).
    pub fn implies(&self, other: &TruthTable) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TT{}[", self.vars)?;
        for w in self.words.iter().rev() {
            if self.vars < 6 {
                write!(f, "{:0width$x}", w, width = ((1usize << self.vars) / 4).max(1))?;
            } else {
                write!(f, "{w:016x}")?;
            }
        }
        write!(f, "]")
    }
}

impl Not for &TruthTable {
    type Output = TruthTable;

    fn not(self) -> TruthTable {
        let mut t = TruthTable { vars: self.vars, words: self.words.iter().map(|w| !w).collect() };
        t.mask();
        t
    }
}

impl Not for TruthTable {
    type Output = TruthTable;

    fn not(self) -> TruthTable {
        !&self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &TruthTable {
            type Output = TruthTable;

            fn $method(self, rhs: &TruthTable) -> TruthTable {
                assert_eq!(self.vars, rhs.vars, "truth tables over different variable counts");
                TruthTable {
                    vars: self.vars,
                    words: self.words.iter().zip(&rhs.words).map(|(a, b)| a $op b).collect(),
                }
            }
        }
    };
}

binop!(BitAnd, bitand, &);
binop!(BitOr, bitor, |);
binop!(BitXor, bitxor, ^);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn elementary_tables() {
        let a = TruthTable::var(2, 0);
        let b = TruthTable::var(2, 1);
        assert_eq!((&a & &b).word(), 0b1000);
        assert_eq!(TruthTable::var(1, 0).word(), 0b10);
        assert_eq!((&a | &b).word(), 0b1110);
        assert_eq!((!&a).word(), 0b0101);
        assert!(TruthTable::one(3).is_one());
    }

    #[test]
    fn large_variables() {
        let v7 = TruthTable::var(8, 7);
        assert_eq!(v7.words(), &[0, 0, !0, !0]);
        for m in 0..256 {
            assert_eq!(v7.get(m), m >> 7 & 1 == 1);
        }
    }

    proptest! {
        #[test]
        fn projections_match_minterm_bits(vars in 1usize..10, seed in any::<u64>()) {
            let i = (seed as usize) % vars;
            let t = TruthTable::var(vars, i);
            for m in 0..1usize << vars {
                prop_assert_eq!(t.get(m), m >> i & 1 == 1);
            }
            prop_assert!(t.depends_on(i));
            for j in (0..vars).filter(|&j| j != i) {
                prop_assert!(!t.depends_on(j));
            }
        }

        #[test]
        fn de_morgan(vars in 1usize..9, s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = TruthTable::from_fn(vars, |m| (s1.rotate_left(m as u32) ^ m as u64) & 1 == 1);
            let b = TruthTable::from_fn(vars, |m| (s2.rotate_right(m as u32) ^ (m as u64 >> 1)) & 1 == 1);
            prop_assert_eq!(!(&a & &b), &!&a | &!&b);
            prop_assert!((&a & &b).implies(&a));
        }
    }
}
