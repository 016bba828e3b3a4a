use std::path::Path;

use boolgebra::aig::{read_aiger_file, write_aiger, AigerFormat};
use boolgebra::corpus::{bundled, c17, comparator, ripple_adder};
use boolgebra::Aig;

fn eval(g: &Aig, bits: u64) -> Vec<bool> {
    let words: Vec<u64> = (0..g.num_inputs()).map(|i| if bits >> i & 1 == 1 { !0 } else { 0 }).collect();
    boolgebra::aig::simulate(g, &words).unwrap().iter().map(|w| w & 1 == 1).collect()
}

#[test]
fn checked_in_files_match_the_generators() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks");
    for (name, g) in bundled() {
        let on_disk = std::fs::read(dir.join(format!("{name}.aag"))).unwrap();
        assert_eq!(on_disk, write_aiger(&g, AigerFormat::Ascii), "{name}: rerun the gen_corpus example");
        read_aiger_file(dir.join(format!("{name}.aag"))).unwrap().check(false).unwrap();
    }
}

#[test]
fn adder_adds() {
    let g = ripple_adder(3);
    for x in 0..128u64 {
        let (a, b, c) = (x & 7, x >> 3 & 7, x >> 6);
        let out = eval(&g, x);
        let sum: u64 = out.iter().enumerate().map(|(i, &v)| (v as u64) << i).sum();
        assert_eq!(sum, a + b + c);
    }
}

#[test]
fn comparator_orders() {
    let g = comparator(3);
    for x in 0..64u64 {
        let (a, b) = (x & 7, x >> 3);
        assert_eq!(eval(&g, x), vec![a < b, a == b, a > b]);
    }
}

#[test]
fn c17_truth() {
    let g = c17();
    for x in 0..32u64 {
        let i: Vec<bool> = (0..5).map(|k| x >> k & 1 == 1).collect();
        let nand = |a: bool, b: bool| !(a && b);
        let n10 = nand(i[0], i[2]);
        let n11 = nand(i[2], i[3]);
        let n16 = nand(i[1], n11);
        let n19 = nand(n11, i[4]);
        assert_eq!(eval(&g, x), vec![nand(n10, n16), nand(n16, n19)]);
    }
}

#[test]
fn multiplier_multiplies() {
    let g = boolgebra::corpus::array_multiplier(3);
    for x in 0..64u64 {
        let out = eval(&g, x);
        let prod: u64 = out.iter().enumerate().map(|(i, &v)| (v as u64) << i).sum();
        assert_eq!(prod, (x & 7) * (x >> 3));
    }
}

#[test]
fn alu_selects_its_operation() {
    let g = boolgebra::corpus::alu(2);
    for x in 0..64u64 {
        let (a, b, s) = (x & 3, x >> 2 & 3, x >> 4);
        let want = match s {
            0 => a & b,
            1 => a | b,
            2 => a ^ b,
            _ => (a + b) & 3,
        };
        let out = eval(&g, x);
        assert_eq!((out[0] as u64) | (out[1] as u64) << 1, want, "a {a} b {b} s {s}");
        assert_eq!(out[2], want == 0);
    }
}
