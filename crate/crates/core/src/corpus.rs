//! Synthetic design generators: random graphs for tests and the structured
//! circuits bundled under `benchmarks/`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aig::{parse_aiger, Aig, AigerFormat, Lit, NodeId};
use crate::transforms::DecisionVector;

/// Random structurally hashed graph. Gates pick operands among recent
/// signals, so the result has some depth; outputs are the last gates plus
/// random picks. Folding may leave fewer than `ands` gates.
pub fn random_aig(seed: u64, pis: usize, ands: usize, pos: usize) -> Aig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Aig::new();
    let mut sigs: Vec<Lit> = (0..pis).map(|_| g.add_input()).collect();
    for _ in 0..ands {
        let window = sigs.len().min(pis + 8);
        let pick = |rng: &mut ChaCha8Rng| sigs[sigs.len() - 1 - rng.gen_range(0..window)] ^ rng.gen_bool(0.5);
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let l = g.make_and(a, b);
        if !l.is_const() && !sigs.contains(&l.regular()) {
            sigs.push(l.regular());
        }
    }
    let mut outs: Vec<Lit> = sigs[pis..].iter().rev().take(pos).copied().collect();
    while outs.len() < pos {
        outs.push(*sigs.choose(&mut rng).unwrap());
    }
    for o in outs {
        g.add_output(o ^ rng.gen_bool(0.3));
    }
    g
}

/// Random graph with redundancy: each output is a sum of products written
/// out gate by gate without structural hashing, the way a naive netlist
/// translation would produce it.
pub fn random_sop_aig(seed: u64, pis: usize, pos: usize, cubes: usize, lits: usize) -> Aig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Aig::new();
    let ins: Vec<Lit> = (0..pis).map(|_| g.add_input()).collect();
    for _ in 0..pos {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=cubes) {
            let k = rng.gen_range(1..=lits.min(pis));
            let mut vars: Vec<usize> = (0..pis).collect();
            vars.shuffle(&mut rng);
            let mut t = ins[vars[0]] ^ rng.gen_bool(0.5);
            for &v in &vars[1..k] {
                t = g.add_and_raw(t, ins[v] ^ rng.gen_bool(0.5));
            }
            terms.push(t);
        }
        let mut acc = !terms[0];
        for &t in &terms[1..] {
            acc = g.add_and_raw(acc, !t);
        }
        g.add_output(!acc);
    }
    g
}

/// 21-gate graph on which per-node orchestration beats every standalone pass:
/// rewrite alone reaches 19 gates, resubstitution 20, refactor 17, and a
/// mixed decision vector 15.
pub const ORCHESTRATION_EXAMPLE: &str = "aag 30 9 0 6 21
2
4
6
8
10
12
14
16
18
30
34
54
56
58
60
20 13 7
22 9 4
24 15 2
26 10 3
28 6 2
30 23 16
32 28 16
34 28 4
36 33 6
38 13 11
40 24 22
42 21 15
44 40 15
46 28 23
48 44 42
50 36 33
52 37 26
54 50 44
56 51 38
58 52 49
60 46 38
";

/// Three-input graph whose nodes illustrate the feature rows: `d` has an
/// inverted left and a plain right fanin, `p` admits a rewrite saving one
/// gate, and `g` has static row `[0, 1, 0, -1, 1, 3, 1, 1]`.
pub const FEATURE_EXAMPLE: &str = "aag 16 3 0 4 13
2
4
6
14
23
27
32
8 7 4
10 9 2
12 6 5
14 13 10
16 5 2
18 6 2
20 16 7
22 21 19
24 7 5
26 25 5
28 4 2
30 6 2
32 30 28
";

pub struct FeatureExample {
    pub aig: Aig,
    pub d: NodeId,
    pub p: NodeId,
    pub g: NodeId,
    /// A decision vector under which `p` is rewritten and `g` left alone.
    pub sample2: DecisionVector,
}

pub fn orchestration_example() -> Aig {
    parse_aiger(ORCHESTRATION_EXAMPLE.as_bytes(), AigerFormat::Ascii).expect("embedded graph parses")
}

pub fn feature_example() -> FeatureExample {
    let aig = parse_aiger(FEATURE_EXAMPLE.as_bytes(), AigerFormat::Ascii).expect("embedded graph parses");
    let sample2 = DecisionVector::from_rle("1*0,1*2,1*0,2*1,2*0,1*2,4*0,2*2,1*1,1*0").expect("valid vector");
    FeatureExample { aig, d: 6, p: 16, g: 7, sample2 }
}

/// ISCAS-85 c17: six NAND gates over five inputs.
pub fn c17() -> Aig {
    let mut g = Aig::new();
    let i: Vec<Lit> = (0..5).map(|_| g.add_input()).collect();
    let nand = |g: &mut Aig, a: Lit, b: Lit| !g.make_and(a, b);
    let n10 = nand(&mut g, i[0], i[2]);
    let n11 = nand(&mut g, i[2], i[3]);
    let n16 = nand(&mut g, i[1], n11);
    let n19 = nand(&mut g, n11, i[4]);
    let n22 = nand(&mut g, n10, n16);
    let n23 = nand(&mut g, n16, n19);
    g.add_output(n22);
    g.add_output(n23);
    g
}

fn full_adder(g: &mut Aig, a: Lit, b: Lit, c: Lit) -> (Lit, Lit) {
    let ab = g.make_xor(a, b);
    let s = g.make_xor(ab, c);
    let x = g.make_and(a, b);
    let y = g.make_and(ab, c);
    (s, g.make_or(x, y))
}

/// Ripple-carry adder of two `bits`-wide words with carry in and out.
pub fn ripple_adder(bits: usize) -> Aig {
    let mut g = Aig::new();
    let a: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let b: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let mut carry = g.add_input();
    for k in 0..bits {
        let (s, c) = full_adder(&mut g, a[k], b[k], carry);
        g.add_output(s);
        carry = c;
    }
    g.add_output(carry);
    g
}

/// Unsigned array multiplier of two `bits`-wide words.
pub fn array_multiplier(bits: usize) -> Aig {
    let mut g = Aig::new();
    let a: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let b: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let mut acc: Vec<Lit> = (0..bits).map(|j| g.make_and(a[j], b[0])).collect();
    let mut out = vec![acc[0]];
    for &bi in &b[1..] {
        let mut carry = Lit::FALSE;
        let mut next = Vec::with_capacity(bits);
        for (j, &aj) in a.iter().enumerate() {
            let pp = g.make_and(aj, bi);
            let above = acc.get(j + 1).copied().unwrap_or(Lit::FALSE);
            let (s, c) = full_adder(&mut g, pp, above, carry);
            next.push(s);
            carry = c;
        }
        out.push(next[0]);
        next.push(carry);
        acc = next;
    }
    out.extend_from_slice(&acc[1..]);
    for o in out {
        g.add_output(o);
    }
    g
}

/// Small ALU over two words: AND, OR, XOR or sum, picked by two select
/// lines, with a zero flag.
pub fn alu(bits: usize) -> Aig {
    let mut g = Aig::new();
    let a: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let b: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let s0 = g.add_input();
    let s1 = g.add_input();
    let mut carry = Lit::FALSE;
    let mut any = Lit::FALSE;
    for k in 0..bits {
        let and = g.make_and(a[k], b[k]);
        let or = g.make_or(a[k], b[k]);
        let xor = g.make_xor(a[k], b[k]);
        let (sum, c) = full_adder(&mut g, a[k], b[k], carry);
        carry = c;
        let lo = g.make_mux(s0, or, and);
        let hi = g.make_mux(s0, sum, xor);
        let r = g.make_mux(s1, hi, lo);
        g.add_output(r);
        any = g.make_or(any, r);
    }
    g.add_output(!any);
    g
}

/// Magnitude comparator of two `bits`-wide words: less, equal, greater.
pub fn comparator(bits: usize) -> Aig {
    let mut g = Aig::new();
    let a: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let b: Vec<Lit> = (0..bits).map(|_| g.add_input()).collect();
    let mut lt = Lit::FALSE;
    let mut eq = !Lit::FALSE;
    for k in 0..bits {
        let here_lt = g.make_and(!a[k], b[k]);
        let same = !g.make_xor(a[k], b[k]);
        let below = g.make_and(same, lt);
        lt = g.make_or(here_lt, below);
        eq = g.make_and(eq, same);
    }
    let gt = g.make_and(!lt, !eq);
    g.add_output(lt);
    g.add_output(eq);
    g.add_output(gt);
    g
}

/// Every bundled benchmark by name, as written under `benchmarks/`.
pub fn bundled() -> Vec<(&'static str, Aig)> {
    vec![
        ("c17", c17()),
        ("orchestration21", orchestration_example()),
        ("features13", feature_example().aig),
        ("adder4", ripple_adder(4)),
        ("adder7", ripple_adder(7)),
        ("mult4", array_multiplier(4)),
        ("alu4", alu(4)),
        ("sop8", random_sop_aig(8, 8, 4, 6, 4)),
        ("sop10", random_sop_aig(10, 10, 6, 8, 5)),
        ("sop12", random_sop_aig(12, 12, 8, 10, 6)),
        ("cmp7", comparator(7)),
        ("sop14", random_sop_aig(14, 14, 10, 10, 6)),
        ("sop16", random_sop_aig(16, 16, 16, 14, 7)),
    ]
}
