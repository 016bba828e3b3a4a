//! Algebraic factoring of sum-of-products covers into AND/OR trees.
//!
//! Cubes are literal sets (`u32`, bit `2i` for `x_i`, bit `2i+1` for `!x_i`).
//! Division is algebraic; divisors are found by repeatedly dividing by the
//! most frequent literal until the quotient is cube-free (a kernel).

use std::collections::HashMap;
use std::fmt;

use super::recipe::{RLit, Recipe};
use crate::aig::Lit;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    /// Literal id: `2 * var + complemented`.
    Lit(u8),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    pub fn num_literals(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Lit(_) => 1,
            Expr::And(v) | Expr::Or(v) => v.iter().map(Expr::num_literals).sum(),
        }
    }

    pub fn eval(&self, m: usize) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Lit(l) => (m >> (l >> 1) & 1 == 1) ^ (l & 1 == 1),
            Expr::And(v) => v.iter().all(|e| e.eval(m)),
            Expr::Or(v) => v.iter().any(|e| e.eval(m)),
        }
    }

    fn and(parts: Vec<Expr>) -> Expr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Expr::And(v) => flat.extend(v),
                Expr::Const(true) => {}
                Expr::Const(false) => return Expr::Const(false),
                e => flat.push(e),
            }
        }
        match flat.len() {
            0 => Expr::Const(true),
            1 => flat.pop().unwrap(),
            _ => Expr::And(flat),
        }
    }

    fn or(parts: Vec<Expr>) -> Expr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Expr::Or(v) => flat.extend(v),
                Expr::Const(false) => {}
                Expr::Const(true) => return Expr::Const(true),
                e => flat.push(e),
            }
        }
        match flat.len() {
            0 => Expr::Const(false),
            1 => flat.pop().unwrap(),
            _ => Expr::Or(flat),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(b) => write!(f, "{}", *b as u8),
            Expr::Lit(l) => write!(f, "{}x{}", if l & 1 == 1 { "!" } else { "" }, l >> 1),
            Expr::And(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    match e {
                        Expr::Or(_) => write!(f, "({e})")?,
                        _ => write!(f, "{e}")?,
                    }
                }
                Ok(())
            }
            Expr::Or(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

fn cube_expr(c: u32) -> Expr {
    Expr::and((0..32).filter(|i| c >> i & 1 == 1).map(|i| Expr::Lit(i as u8)).collect())
}

fn literal_counts(f: &[u32]) -> [u32; 32] {
    let mut n = [0u32; 32];
    for &c in f {
        for (i, slot) in n.iter_mut().enumerate() {
            *slot += c >> i & 1;
        }
    }
    n
}

/// Most frequent literal occurring in at least two cubes (ties: lowest id).
fn best_literal(f: &[u32]) -> Option<u32> {
    let counts = literal_counts(f);
    let (i, &n) = counts.iter().enumerate().rev().max_by_key(|(_, &n)| n)?;
    (n >= 2).then_some(i as u32)
}

fn common_cube(f: &[u32]) -> u32 {
    f.iter().fold(!0, |acc, &c| acc & c)
}

fn make_cube_free(f: Vec<u32>) -> Vec<u32> {
    let c = common_cube(&f);
    f.into_iter().map(|x| x & !c).collect()
}

/// Algebraic division: `f = q * d + r`.
pub fn divide(f: &[u32], d: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut q: Option<Vec<u32>> = None;
    for &dc in d {
        let mut part: Vec<u32> = f.iter().filter(|&&c| c & dc == dc).map(|&c| c & !dc).collect();
        part.sort_unstable();
        part.dedup();
        q = Some(match q {
            None => part,
            Some(prev) => prev.into_iter().filter(|c| part.contains(c)).collect(),
        });
    }
    let q = q.unwrap_or_default();
    let mut product = Vec::new();
    for &qc in &q {
        for &dc in d {
            product.push(qc | dc);
        }
    }
    let r = f.iter().copied().filter(|c| !product.contains(c)).collect();
    (q, r)
}

fn quick_divisor(f: &[u32]) -> Option<Vec<u32>> {
    let mut g = f.to_vec();
    let mut found = false;
    while let Some(l) = best_literal(&g) {
        let bit = 1 << l;
        g = make_cube_free(g.into_iter().filter(|c| c & bit != 0).collect());
        found = true;
    }
    (found && g.len() >= 2).then_some(g)
}

fn literal_factor(f: &[u32]) -> Expr {
    let l = best_literal(f).expect("some literal repeats");
    let bit = 1u32 << l;
    let q: Vec<u32> = f.iter().filter(|&&c| c & bit != 0).map(|&c| c & !bit).collect();
    let r: Vec<u32> = f.iter().copied().filter(|&c| c & bit == 0).collect();
    Expr::or(vec![Expr::and(vec![Expr::Lit(l as u8), factor(&q)]), factor(&r)])
}

/// Factored form of the cover `f`.
pub fn factor(f: &[u32]) -> Expr {
    if f.is_empty() {
        return Expr::Const(false);
    }
    if f.contains(&0) {
        return Expr::Const(true);
    }
    if f.len() == 1 {
        return cube_expr(f[0]);
    }
    let common = common_cube(f);
    if common != 0 {
        let rest: Vec<u32> = f.iter().map(|&c| c & !common).collect();
        return Expr::and(vec![cube_expr(common), factor(&rest)]);
    }
    let Some(k) = quick_divisor(f) else {
        return Expr::or(f.iter().map(|&c| cube_expr(c)).collect());
    };
    let (q, _) = divide(f, &k);
    if q.len() <= 1 {
        return literal_factor(f);
    }
    let q = make_cube_free(q);
    let (d, r) = divide(f, &q);
    if d.is_empty() {
        return literal_factor(f);
    }
    Expr::or(vec![Expr::and(vec![factor(&q), factor(&d)]), factor(&r)])
}

struct RecipeBuilder {
    vars: usize,
    gates: Vec<(RLit, RLit)>,
    hash: HashMap<(RLit, RLit), RLit>,
}

impl RecipeBuilder {
    fn and2(&mut self, a: RLit, b: RLit) -> RLit {
        if a == b {
            return a;
        }
        if a == !b || a == RLit::FALSE || b == RLit::FALSE {
            return RLit::FALSE;
        }
        if a == RLit::TRUE {
            return b;
        }
        if b == RLit::TRUE {
            return a;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&l) = self.hash.get(&key) {
            return l;
        }
        let l = RLit::new(1 + self.vars + self.gates.len(), false);
        self.gates.push(key);
        self.hash.insert(key, l);
        l
    }

    fn and_all(&mut self, lits: &[RLit]) -> RLit {
        match lits.len() {
            0 => RLit::TRUE,
            1 => lits[0],
            n => {
                let a = self.and_all(&lits[..n / 2]);
                let b = self.and_all(&lits[n / 2..]);
                self.and2(a, b)
            }
        }
    }

    fn lower(&mut self, e: &Expr) -> RLit {
        match e {
            Expr::Const(b) => RLit::FALSE ^ *b,
            Expr::Lit(l) => RLit::new(1 + (l >> 1) as usize, l & 1 == 1),
            Expr::And(v) => {
                let lits: Vec<RLit> = v.iter().map(|x| self.lower(x)).collect();
                self.and_all(&lits)
            }
            Expr::Or(v) => {
                let lits: Vec<RLit> = v.iter().map(|x| !self.lower(x)).collect();
                !self.and_all(&lits)
            }
        }
    }
}

/// Gate-level recipe for `e` over the given leaf literals, optionally
/// complemented at the output.
pub fn expr_to_recipe(e: &Expr, leaves: &[Lit], complement: bool) -> Recipe {
    let mut b = RecipeBuilder { vars: leaves.len(), gates: Vec::new(), hash: HashMap::new() };
    let out = b.lower(e);
    Recipe { inputs: leaves.to_vec(), gates: b.gates, output: out ^ complement }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::sop::{irredundant_cover, Cube};
    use crate::truth::TruthTable;
    use proptest::prelude::*;

    fn lits(cubes: &[Cube]) -> Vec<u32> {
        cubes.iter().map(Cube::literal_set).collect()
    }

    #[test]
    fn shares_common_literal() {
        // ab + ac = a(b + c)
        let f = [0b1 | 0b100, 0b1 | 0b10000];
        let e = factor(&f);
        assert_eq!(e.num_literals(), 3);
        assert_eq!(e.to_string(), "x0*(x1+x2)");
    }

    #[test]
    fn kernel_extraction() {
        // ac + ad + bc + bd = (a + b)(c + d)
        let (a, b, c, d) = (1u32, 1 << 2, 1 << 4, 1 << 6);
        let f = [a | c, a | d, b | c, b | d];
        let e = factor(&f);
        assert_eq!(e.num_literals(), 4);
        for m in 0..16 {
            let want = (m & 1 == 1 || m & 2 == 2) && (m & 4 == 4 || m & 8 == 8);
            assert_eq!(e.eval(m), want);
        }
    }

    #[test]
    fn division() {
        let (a, b, c) = (1u32, 1 << 2, 1 << 4);
        let (q, r) = divide(&[a | b, a | c, b | c], &[b, c]);
        assert_eq!(q, vec![a]);
        assert_eq!(r, vec![b | c]);
    }

    proptest! {
        #[test]
        fn factored_form_matches_cover(vars in 1usize..9, seed in any::<u64>()) {
            let f = TruthTable::from_fn(vars, |m| (seed.rotate_left(m as u32 * 5) ^ (m as u64 * 0x9E37)) >> 3 & 1 == 1);
            let cover = irredundant_cover(&f);
            let e = factor(&lits(&cover));
            for m in 0..1usize << vars {
                prop_assert_eq!(e.eval(m), f.get(m));
            }
            let sop_lits: u32 = cover.iter().map(|c| c.num_literals()).sum();
            prop_assert!(e.num_literals() as u32 <= sop_lits.max(1));
        }
    }
}
