use boolgebra::aig::{check_equivalence, EquivalenceMode, Verdict};
use boolgebra::corpus::{random_aig, random_sop_aig};
use boolgebra::transforms::{
    apply_plan, orchestrated_traversal, standalone_pass, DecisionVector, Engine, OpCode, TransformOptions,
};
use boolgebra::Aig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Aig> {
    let mut v = Vec::new();
    for s in 0..12 {
        v.push(random_aig(s, 6 + (s as usize % 5), 40 + 5 * s as usize, 3));
        v.push(random_sop_aig(100 + s, 5 + (s as usize % 6), 3, 6, 4));
    }
    v
}

fn equivalent(a: &Aig, b: &Aig) -> bool {
    check_equivalence(a, b, EquivalenceMode::Exhaustive).unwrap() == Verdict::Equivalent
}

#[test]
fn standalone_passes_preserve_function() {
    let opts = TransformOptions::default();
    for (i, g) in corpus().iter().enumerate() {
        for op in OpCode::ALL {
            let (h, rec) = standalone_pass(g, op, &opts).unwrap();
            h.check(false).unwrap_or_else(|e| panic!("design {i} {op}: {e}"));
            assert!(equivalent(g, &h), "design {i} {op}");
            assert_eq!(rec.total_reduction, g.size() - h.size());
            assert_eq!(rec.gains.iter().sum::<i64>(), rec.total_reduction as i64);
            eprintln!("design {i}: {} -> {op} {}", g.size(), h.size());
        }
    }
}

#[test]
fn random_decisions_preserve_function() {
    let opts = TransformOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (i, g) in corpus().iter().enumerate() {
        for _ in 0..10 {
            let codes = (0..DecisionVector::len_for(g)).map(|_| OpCode::ALL[rng.gen_range(0..3)]).collect();
            let d = DecisionVector::new(codes);
            let (h, rec) = orchestrated_traversal(g, &d, &opts).unwrap();
            h.check(false).unwrap_or_else(|e| panic!("design {i}: {e}"));
            assert!(equivalent(g, &h), "design {i}");
            assert_eq!(rec.gains.iter().sum::<i64>(), rec.total_reduction as i64);
        }
    }
}

#[test]
fn plans_realize_their_gain() {
    let opts = TransformOptions::default();
    for g in corpus() {
        for op in OpCode::ALL {
            let mut h = g.clone();
            let mut engine = Engine::new(opts.clone()).unwrap();
            let ids: Vec<u32> = h.and_nodes().collect();
            for v in ids {
                if !h.is_alive(v) {
                    continue;
                }
                if let Some(plan) = engine.try_op(&mut h, v, op) {
                    let before = h.size() as i64;
                    let stale = plan.clone();
                    let got = apply_plan(&mut h, &plan).unwrap();
                    assert_eq!(got, plan.gain);
                    assert_eq!(before - h.size() as i64, plan.gain);
                    assert!(apply_plan(&mut h, &stale).is_err());
                }
            }
            assert!(equivalent(&g, &h));
        }
    }
}
