use boolgebra::corpus::{feature_example, random_aig, random_sop_aig};
use boolgebra::features::{
    dynamic_features, edge_list, edges_from_text, edges_to_text, features_from_csv, features_to_csv, projected_dynamic,
    static_features, GraphSample, FEATURE_HEADER, PI_SENTINEL,
};
use boolgebra::transforms::{apply_plan, orchestrated_traversal, AppliedOp, DecisionVector, Engine, OpCode, TransformOptions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn example_static_rows() {
    let ex = feature_example();
    let st = static_features(&ex.aig, &TransformOptions::default()).unwrap();
    assert_eq!(st.row_of(ex.d).unwrap()[..2], [1, 0]);
    assert_eq!(st.row_of(ex.p).unwrap()[2..4], [1, 1]);
    assert_eq!(*st.row_of(ex.g).unwrap(), [0, 1, 0, -1, 1, 3, 1, 1]);
}

#[test]
fn example_sample_two_dynamic_rows() {
    let ex = feature_example();
    let (_, rec) = orchestrated_traversal(&ex.aig, &ex.sample2, &TransformOptions::default()).unwrap();
    let dynamic = dynamic_features(&ex.aig, &rec).unwrap();
    let row = |id| dynamic.rows[dynamic.nodes.iter().position(|&n| n == id).unwrap()];
    assert_eq!(row(ex.p), [0, 1, 0, 0]);
    assert_eq!(row(ex.g), [1, 0, 0, 0]);
}

#[test]
fn static_gains_match_applied_reduction() {
    let opts = TransformOptions::default();
    let designs = [random_sop_aig(3, 7, 3, 6, 4), random_aig(4, 8, 50, 4), feature_example().aig];
    for g in &designs {
        let st = static_features(g, &opts).unwrap();
        let mut engine = Engine::new(opts.clone()).unwrap();
        for (&id, row) in st.nodes.iter().zip(&st.rows) {
            if g.is_input(id) {
                assert_eq!(*row, [PI_SENTINEL; 8]);
                continue;
            }
            for op in OpCode::ALL {
                let c = 2 + 2 * op.code() as usize;
                let mut copy = g.clone();
                match engine.try_op(&mut copy, id, op) {
                    Some(plan) => {
                        let before = copy.size();
                        apply_plan(&mut copy, &plan).unwrap();
                        assert_eq!(row[c..c + 2], [1, (before - copy.size()) as i32], "node {id} {op}");
                    }
                    None => assert_eq!(row[c..c + 2], [0, -1], "node {id} {op}"),
                }
            }
        }
    }
}

#[test]
fn dynamic_rows_follow_the_applied_record() {
    let opts = TransformOptions::default();
    let g = random_sop_aig(9, 8, 4, 6, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let d = boolgebra::sampling::random_decision_vector(DecisionVector::len_for(&g), &mut rng);
        let (_, rec) = orchestrated_traversal(&g, &d, &opts).unwrap();
        let dynamic = dynamic_features(&g, &rec).unwrap();
        for (&id, row) in dynamic.nodes.iter().zip(&dynamic.rows) {
            if g.is_input(id) {
                assert_eq!(*row, [PI_SENTINEL; 4]);
            } else {
                let mut want = [0; 4];
                want[rec.op(id).index()] = 1;
                assert_eq!(*row, want);
            }
        }
    }
}

#[test]
fn projection_keeps_only_applicable_assignments() {
    let opts = TransformOptions::default();
    let g = random_sop_aig(11, 8, 4, 6, 4);
    let st = static_features(&g, &opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let d = boolgebra::sampling::random_decision_vector(DecisionVector::len_for(&g), &mut rng);
    let proj = projected_dynamic(&st, &d);
    for (&id, row) in proj.nodes.iter().zip(&proj.rows) {
        if g.is_input(id) {
            continue;
        }
        let op = d.get(id);
        let want = if st.applicable(id, op) { AppliedOp::from(op) } else { AppliedOp::None };
        assert_eq!(row[want.index()], 1);
        assert_eq!(row.iter().sum::<i32>(), 1);
    }
}

#[test]
fn undirected_edges_are_symmetric() {
    let g = random_sop_aig(1, 6, 3, 5, 4);
    let nodes = boolgebra::features::feature_nodes(&g);
    let directed = edge_list(&g, &nodes, true);
    let undirected = edge_list(&g, &nodes, false);
    assert_eq!(directed.len(), 2 * g.size());
    assert_eq!(undirected.len(), 2 * directed.len());
    for &(a, b) in &directed {
        assert!(a < b, "fanin rows precede their nodes");
        assert!(undirected.contains(&(b, a)));
    }
}

#[test]
fn header_names_twelve_columns() {
    assert_eq!(FEATURE_HEADER.split(',').count(), 13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feature_files_round_trip(seed in 0u64..1000, pis in 3usize..8) {
        let opts = TransformOptions::default();
        let g = random_sop_aig(seed, pis, 3, 5, 4);
        let st = static_features(&g, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = boolgebra::sampling::random_decision_vector(DecisionVector::len_for(&g), &mut rng);
        let (_, rec) = orchestrated_traversal(&g, &d, &opts).unwrap();
        let edges = edge_list(&g, &st.nodes, false);
        let s = GraphSample::new(edges, &st, &dynamic_features(&g, &rec).unwrap()).unwrap();
        let (nodes, rows) = features_from_csv(&features_to_csv(&s.nodes, &s.features)).unwrap();
        prop_assert_eq!(&nodes, &s.nodes);
        prop_assert_eq!(&rows, &s.features);
        let back = edges_from_text(&edges_to_text(&s.nodes, &s.edges), &nodes).unwrap();
        prop_assert_eq!(back, s.edges);
    }

    #[test]
    fn every_row_is_sentinel_or_well_formed(seed in 0u64..1000) {
        let g = random_aig(seed, 6, 30, 3);
        let st = static_features(&g, &TransformOptions::default()).unwrap();
        for (&id, r) in st.nodes.iter().zip(&st.rows) {
            if g.is_input(id) {
                prop_assert_eq!(*r, [PI_SENTINEL; 8]);
            } else {
                prop_assert!(r[0] == 0 || r[0] == 1);
                prop_assert!(r[1] == 0 || r[1] == 1);
                for c in [2, 4, 6] {
                    prop_assert!((r[c] == 0 && r[c + 1] == -1) || (r[c] == 1 && r[c + 1] >= 1));
                }
            }
        }
    }
}
