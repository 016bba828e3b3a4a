//! NPN canonization of 4-input functions.
//!
//! A transform `t` maps a function `c` to `g(x) = o ^ c(y)` with
//! `y[j] = x[perm[j]] ^ neg[j]`. Every 4-input function `f` is stored with its
//! class representative (the smallest truth table in its orbit) and a
//! transform taking the representative to `f`.

use std::sync::OnceLock;

pub const PERMS: [[u8; 4]; 24] = {
    let mut out = [[0u8; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let d = 6 - a - b - c;
                if a != b && a != c && b != c && d < 4 && d != a && d != b && d != c {
                    out[n] = [a as u8, b as u8, c as u8, d as u8];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    /// Bit `j` complements input `j` of the representative.
    pub neg: u8,
    pub out_neg: bool,
}

impl NpnTransform {
    pub const IDENTITY: NpnTransform = NpnTransform { perm: [0, 1, 2, 3], neg: 0, out_neg: false };

    /// The function `x -> o ^ c(y)`.
    pub fn apply(&self, c: u16) -> u16 {
        let mut g = 0u16;
        for x in 0..16u16 {
            let mut y = 0u16;
            for j in 0..4 {
                let bit = (x >> self.perm[j]) & 1 ^ (self.neg as u16 >> j) & 1;
                y |= bit << j;
            }
            if (c >> y) & 1 == 1 {
                g |= 1 << x;
            }
        }
        if self.out_neg {
            !g
        } else {
            g
        }
    }

    fn all() -> impl Iterator<Item = NpnTransform> {
        PERMS.iter().flat_map(|&perm| {
            (0..16u8).flat_map(move |neg| {
                [false, true].into_iter().map(move |out_neg| NpnTransform { perm, neg, out_neg })
            })
        })
    }
}

pub struct NpnTable {
    canon: Vec<u16>,
    transform: Vec<NpnTransform>,
    classes: Vec<u16>,
}

impl NpnTable {
    fn build() -> Self {
        let mut canon = vec![0u16; 1 << 16];
        let mut transform = vec![NpnTransform::IDENTITY; 1 << 16];
        let mut done = vec![false; 1 << 16];
        let mut classes = Vec::new();
        for f in 0..=u16::MAX {
            if done[f as usize] {
                continue;
            }
            let rep = NpnTransform::all().map(|t| t.apply(f)).min().unwrap();
            classes.push(rep);
            for t in NpnTransform::all() {
                let g = t.apply(rep) as usize;
                if !done[g] {
                    done[g] = true;
                    canon[g] = rep;
                    transform[g] = t;
                }
            }
        }
        NpnTable { canon, transform, classes }
    }

    /// Shared table, built on first use.
    pub fn get() -> &'static NpnTable {
        static TABLE: OnceLock<NpnTable> = OnceLock::new();
        TABLE.get_or_init(NpnTable::build)
    }

    /// Representative of the class of `f` and the transform taking it to `f`.
    pub fn canonize(&self, f: u16) -> (u16, NpnTransform) {
        (self.canon[f as usize], self.transform[f as usize])
    }

    /// Class representatives in ascending order.
    pub fn classes(&self) -> &[u16] {
        &self.classes
    }
}

/// Widens a table over `n <= 4` variables to 4 variables.
pub fn extend_to_4(word: u64, n: usize) -> u16 {
    let mut t = word & crate::truth::word_mask(n);
    let mut width = 1 << n;
    while width < 16 {
        t |= t << width;
        width *= 2;
    }
    t as u16
}
