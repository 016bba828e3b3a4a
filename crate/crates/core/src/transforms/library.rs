//! Precomputed small AIGs for every NPN class of 4-input functions.
//!
//! An exact dynamic program over AND/inverter formulas (trees with free
//! complementation) finds the cheapest formula of every 4-input function.
//! Each class representative then gets the smallest of: its own formula
//! merged into a DAG, or a top-level AND of two formula-built operands whose
//! DAGs share gates (this recovers e.g. the 9-gate 4-input parity).

use std::collections::HashMap;
use std::sync::OnceLock;

use super::npn::NpnTable;
use super::recipe::RLit;

const UNKNOWN: u8 = u8::MAX;

#[derive(Clone, Copy)]
enum Formula {
    Leaf,
    And(u16, u16),
    Nand(u16, u16),
}

struct FormulaTable {
    cost: Vec<u8>,
    how: Vec<Formula>,
}

impl FormulaTable {
    fn build() -> Self {
        let mut cost = vec![UNKNOWN; 1 << 16];
        let mut how = vec![Formula::Leaf; 1 << 16];
        let mut levels: Vec<Vec<u16>> = vec![Vec::new()];
        let mut base = vec![0u16, 0xFFFF];
        for v in [0xAAAAu16, 0xCCCC, 0xF0F0, 0xFF00] {
            base.push(v);
            base.push(!v);
        }
        for f in base {
            cost[f as usize] = 0;
            levels[0].push(f);
        }
        let mut known = levels[0].len();
        let mut s = 0usize;
        while known < 1 << 16 {
            s += 1;
            let mut fresh = Vec::new();
            for i in 0..=(s - 1) / 2 {
                let j = s - 1 - i;
                let (li, lj) = (&levels[i], &levels[j]);
                for (ai, &a) in li.iter().enumerate() {
                    let start = if i == j { ai } else { 0 };
                    for &b in &lj[start..] {
                        let h = a & b;
                        if cost[h as usize] == UNKNOWN {
                            cost[h as usize] = s as u8;
                            how[h as usize] = Formula::And(a, b);
                            cost[!h as usize] = s as u8;
                            how[!h as usize] = Formula::Nand(a, b);
                            fresh.push(h);
                            fresh.push(!h);
                        }
                    }
                }
            }
            known += fresh.len();
            levels.push(fresh);
        }
        FormulaTable { cost, how }
    }
}

/// A small AIG over four inputs. Gate literals use [`RLit`] numbering:
/// index 0 is the constant, 1..=4 the inputs, 5.. the gates in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LibraryEntry {
    pub class: u16,
    pub gates: Vec<(RLit, RLit)>,
    pub output: RLit,
    /// Size of the cheapest formula before structural sharing.
    pub formula_size: u8,
}

impl LibraryEntry {
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Truth table computed by the structure.
    pub fn eval(&self) -> u16 {
        let mut vals = vec![0u16, 0xAAAA, 0xCCCC, 0xF0F0, 0xFF00];
        let get = |l: RLit, vals: &[u16]| {
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

/// A DAG as a list of AND gates keyed by the function they compute.
/// Operands are functions too (possibly complemented gate outputs, inputs
/// or constants), so two DAGs can be merged by function.
#[derive(Clone, Default)]
struct Dag {
    gates: Vec<(u16, u16, u16)>,
}

const VARS: [u16; 4] = [0xAAAA, 0xCCCC, 0xF0F0, 0xFF00];

fn is_literal(f: u16) -> bool {
    f == 0 || f == 0xFFFF || VARS.iter().any(|&v| f == v || f == !v)
}

impl Dag {
    fn has(&self, f: u16) -> bool {
        is_literal(f) || self.gates.iter().any(|&(g, _, _)| g == f || g == !f)
    }

    fn merge(&mut self, other: &Dag) {
        for &g in &other.gates {
            if !self.has(g.0) {
                self.gates.push(g);
            }
        }
    }

    fn and(a: &Dag, b: &Dag, fa: u16, fb: u16) -> Dag {
        let mut d = a.clone();
        d.merge(b);
        if !d.has(fa & fb) {
            d.gates.push((fa & fb, fa, fb));
        }
        d
    }

    fn from_formula(table: &FormulaTable, f: u16, memo: &mut HashMap<u16, Dag>) -> Dag {
        if is_literal(f) {
            return Dag::default();
        }
        if let Some(d) = memo.get(&f) {
            return d.clone();
        }
        let d = match table.how[f as usize] {
            Formula::Leaf => unreachable!("non-literal function without a decomposition"),
            Formula::And(a, b) | Formula::Nand(a, b) => {
                let da = Dag::from_formula(table, a, memo);
                let db = Dag::from_formula(table, b, memo);
                Dag::and(&da, &db, a, b)
            }
        };
        memo.insert(f, d.clone());
        d
    }

    fn lit(&self, f: u16) -> RLit {
        match f {
            0 => return RLit::FALSE,
            0xFFFF => return RLit::TRUE,
            _ => {}
        }
        for (j, v) in VARS.into_iter().enumerate() {
            if f == v {
                return RLit::new(1 + j, false);
            }
            if f == !v {
                return RLit::new(1 + j, true);
            }
        }
        let i = self.gates.iter().position(|&(g, _, _)| g == f || g == !f).expect("operand defined earlier");
        RLit::new(5 + i, self.gates[i].0 != f)
    }
}

/// Smallest DAG for `f` among its formula and every split `f = a & b` or
/// `!f = a & b` whose operands are implemented by their formulas.
fn best_dag(table: &FormulaTable, f: u16, memo: &mut HashMap<u16, Dag>) -> Dag {
    let mut best = Dag::from_formula(table, f, memo);
    for t in [f, !f] {
        let zeros = (!t).count_ones();
        if zeros > 10 || t == 0 {
            continue;
        }
        // Supersets of t: t plus any subset of its zero positions.
        let free: Vec<u16> = (0..16).filter(|i| t >> i & 1 == 0).map(|i| 1u16 << i).collect();
        let supers: Vec<u16> = (0u32..1 << free.len())
            .map(|m| free.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).fold(t, |acc, (_, &b)| acc | b))
            .filter(|&a| a != t && a != 0xFFFF)
            .collect();
        let dags: Vec<Dag> = supers.iter().map(|&a| Dag::from_formula(table, a, memo)).collect();
        for i in 0..supers.len() {
            if dags[i].gates.len() + 1 >= best.gates.len() {
                continue;
            }
            for j in i..supers.len() {
                if supers[i] & supers[j] != t {
                    continue;
                }
                let d = Dag::and(&dags[i], &dags[j], supers[i], supers[j]);
                if d.gates.len() < best.gates.len() {
                    best = d;
                }
            }
        }
    }
    best
}

pub struct Library {
    entries: HashMap<u16, LibraryEntry>,
}

impl Library {
    fn build() -> Self {
        let table = FormulaTable::build();
        let npn = NpnTable::get();
        let mut entries = HashMap::new();
        let mut memo = HashMap::new();
        for &c in npn.classes() {
            let dag = best_dag(&table, c, &mut memo);
            let gates = dag.gates.iter().map(|&(_, a, b)| (dag.lit(a), dag.lit(b))).collect();
            let entry = LibraryEntry { class: c, gates, output: dag.lit(c), formula_size: table.cost[c as usize] };
            entries.insert(c, entry);
        }
        Library { entries }
    }

    /// Shared library, built on first use.
    pub fn get() -> &'static Library {
        static LIB: OnceLock<Library> = OnceLock::new();
        LIB.get_or_init(Library::build)
    }

    pub fn entry(&self, class: u16) -> &LibraryEntry {
        &self.entries[&class]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending class order.
    pub fn entries(&self) -> Vec<&LibraryEntry> {
        let mut v: Vec<&LibraryEntry> = self.entries.values().collect();
        v.sort_by_key(|e| e.class);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_class_is_realized() {
        let lib = Library::get();
        assert_eq!(lib.len(), 222);
        for e in lib.entries() {
            assert_eq!(e.eval(), e.class, "class {:04x}", e.class);
            assert!(e.size() <= e.formula_size as usize);
        }
    }

    #[test]
    fn known_sizes() {
        let lib = Library::get();
        let npn = NpnTable::get();
        let size = |f: u16| lib.entry(npn.canonize(f).0).size();
        assert_eq!(size(0x8888), 1); // a & b
        assert_eq!(size(0x8080), 2); // a & b & c
        assert_eq!(size(0x6666), 3); // a ^ b
        assert_eq!(size(0x6996), 9); // a ^ b ^ c ^ d
        assert_eq!(size(0xAAAA), 0);
        assert_eq!(size(0x0000), 0);
    }
}
