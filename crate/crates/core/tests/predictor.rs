use std::sync::Arc;

use boolgebra::predictor::{
    model_from_bytes, model_to_bytes, spearman, train, Adjacency, Dataset, GraphInput, Lineage, Mode, Model, ModelConfig,
    Scaler, TrainConfig, MAGIC,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> GraphInput {
    let mut edges = Vec::new();
    for i in 1..n as u32 {
        for _ in 0..rng.gen_range(0..3) {
            let j = rng.gen_range(0..i);
            edges.push((j, i));
            edges.push((i, j));
        }
    }
    let x = Array2::from_shape_fn((n, 12), |(i, j)| {
        if i < 2 {
            -99.0
        } else if !(2..8).contains(&j) {
            rng.gen_range(0..2) as f64
        } else {
            rng.gen_range(-1..4) as f64
        }
    });
    GraphInput::new(Arc::new(Adjacency::new(n, &edges).unwrap()), x).unwrap()
}

fn batch(seed: u64, b: usize) -> (Vec<GraphInput>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs = (0..b).map(|_| { let n = rng.gen_range(3..9); random_graph(&mut rng, n) }).collect();
    let labels = (0..b).map(|_| rng.gen::<f64>()).collect();
    (graphs, labels)
}

#[test]
#[allow(clippy::needless_range_loop)]
fn gradients_match_finite_differences() {
    for round in 0..5u64 {
        let (graphs, labels) = batch(100 + round, 6);
        let refs: Vec<&GraphInput> = graphs.iter().collect();
        let mut model = Model::new(ModelConfig::tiny(round)).unwrap();
        model.scaler = Scaler::fit(12, graphs.iter());
        let seed = 77 + round;
        let (_, grads, _) = model.loss_and_backward(&refs, &labels, seed).unwrap();
        let (mut checked, mut skipped, mut worst) = (0, 0, 0.0f64);
        for t in 0..model.params.len() {
            for k in 0..model.params[t].len() {
                let num = |m: &mut Model, h: f64| {
                    let orig = m.params[t].as_slice().unwrap()[k];
                    m.params[t].as_slice_mut().unwrap()[k] = orig + h;
                    let lp = m.loss(&refs, &labels, Mode::Train, seed).unwrap();
                    m.params[t].as_slice_mut().unwrap()[k] = orig - h;
                    let lm = m.loss(&refs, &labels, Mode::Train, seed).unwrap();
                    m.params[t].as_slice_mut().unwrap()[k] = orig;
                    (lp - lm) / (2.0 * h)
                };
                let n1 = num(&mut model, 1e-5);
                let n2 = num(&mut model, 1e-6);
                let a = grads[t].as_slice().unwrap()[k];
                let scale = a.abs().max(n1.abs());
                if (n1 - n2).abs() > 1e-6 * scale.max(1e-6) {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                let err = (a - n1).abs();
                if err > 1e-10 {
                    let rel = err / scale;
                    worst = worst.max(rel);
                    assert!(rel < 1e-4, "round {round} tensor {t} elem {k}: analytic {a} numeric {n1}");
                }
            }
        }
        eprintln!("round {round}: checked {checked} skipped {skipped} worst {worst:e}");
        assert!(skipped * 20 < checked);
    }
}

fn permuted(g: &GraphInput, edges: &[(u32, u32)], perm: &[usize]) -> GraphInput {
    let n = perm.len();
    let mut x = Array2::zeros((n, 12));
    for (old, &new) in perm.iter().enumerate() {
        x.row_mut(new).assign(&g.x.row(old));
    }
    let e: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (perm[a as usize] as u32, perm[b as usize] as u32)).collect();
    GraphInput::new(Arc::new(Adjacency::new(n, &e).unwrap()), x).unwrap()
}

#[test]
fn scores_ignore_node_numbering() {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 12;
    let mut edges = Vec::new();
    for i in 1..n as u32 {
        let j = rng.gen_range(0..i);
        edges.extend([(j, i), (i, j)]);
    }
    let x = Array2::from_shape_fn((n, 12), |_| rng.gen_range(-1..4) as f64);
    let g = GraphInput::new(Arc::new(Adjacency::new(n, &edges).unwrap()), x).unwrap();
    let mut model = Model::new(ModelConfig::reduced(3)).unwrap();
    model.scaler = Scaler::fit(12, [&g]);
    let base = model.predict(&[&g]).unwrap()[0];
    for _ in 0..5 {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = permuted(&g, &edges, &perm);
        assert_eq!(model.predict(&[&h]).unwrap()[0], base);
    }
}

#[test]
fn model_files_round_trip() {
    let (graphs, _) = batch(3, 4);
    let refs: Vec<&GraphInput> = graphs.iter().collect();
    let mut model = Model::new(ModelConfig::tiny(11)).unwrap();
    model.scaler = Scaler::fit(12, graphs.iter());
    let lineage = Lineage { train_seed: 5, epochs: 7 };
    let bytes = model_to_bytes(&model, lineage);
    let (back, lin) = model_from_bytes(&bytes).unwrap();
    assert_eq!(lin, lineage);
    assert_eq!(back.params, model.params);
    assert_eq!(back.predict(&refs).unwrap(), model.predict(&refs).unwrap());
    assert_eq!(model_to_bytes(&back, lin), bytes);
    assert_eq!(&bytes[..8], MAGIC);
}

#[test]
fn fresh_model_bytes_are_pinned() {
    use sha2::{Digest, Sha256};
    let model = Model::new(ModelConfig::tiny(42)).unwrap();
    let digest = Sha256::digest(model_to_bytes(&model, Lineage::default()));
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, GOLDEN_TINY_42);
}

const GOLDEN_TINY_42: &str = "933fb2918b6f0ce5368a8c6a28db88e36829fb0c31f6b4eabcecad17b7e37665";

#[test]
fn damaged_model_files_are_rejected() {
    let model = Model::new(ModelConfig::tiny(1)).unwrap();
    let bytes = model_to_bytes(&model, Lineage::default());
    assert!(model_from_bytes(&bytes[..bytes.len() - 1]).is_err());
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(model_from_bytes(&longer).is_err());
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(model_from_bytes(&magic).is_err());
    let mut version = bytes;
    version[8] = 99;
    assert!(model_from_bytes(&version).is_err());
}

fn toy_dataset() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut data = Dataset::default();
    for i in 0..60 {
        let g = random_graph(&mut rng, 6);
        let label = (g.x.column(4).sum() / 40.0).clamp(0.0, 1.0);
        data.push(g, label, if i % 2 == 0 { "a" } else { "b" });
    }
    data
}

#[test]
fn zero_learning_rate_changes_nothing() {
    let data = toy_dataset();
    let mut model = Model::new(ModelConfig::tiny(2)).unwrap();
    let before = model_to_bytes(&model, Lineage::default());
    let cfg = TrainConfig { epochs: 3, batch_size: 16, lr: 0.0, ..TrainConfig::reduced(1) };
    train(&mut model, &data, &cfg).unwrap();
    assert_eq!(model_to_bytes(&model, Lineage::default()), before);
}

#[test]
fn training_lowers_the_loss() {
    let data = toy_dataset();
    let mut model = Model::new(ModelConfig::tiny(2)).unwrap();
    let cfg = TrainConfig { epochs: 60, batch_size: 16, lr: 3e-3, ..TrainConfig::reduced(1) };
    let curve = train(&mut model, &data, &cfg).unwrap();
    let first = curve.epochs[0].train_loss;
    let last = curve.epochs.last().unwrap().train_loss;
    assert!(last < 0.5 * first, "{first} -> {last}");
    assert_eq!(curve.to_csv().lines().count(), 61);
}

#[test]
fn training_is_reproducible() {
    let data = toy_dataset();
    let run = || {
        let mut model = Model::new(ModelConfig::tiny(4)).unwrap();
        let cfg = TrainConfig { epochs: 5, batch_size: 16, ..TrainConfig::reduced(9) };
        let curve = train(&mut model, &data, &cfg).unwrap();
        (model_to_bytes(&model, Lineage::default()), curve)
    };
    assert_eq!(run(), run());
}

#[test]
fn split_holds_out_a_share_of_each_design() {
    let data = toy_dataset();
    let (train_idx, test_idx) = data.split(0.2, 3);
    assert_eq!(train_idx.len() + test_idx.len(), data.len());
    for d in ["a", "b"] {
        assert_eq!(test_idx.iter().filter(|&&i| data.designs[i] == d).count(), 6);
    }
    assert_eq!(data.split(0.2, 3), (train_idx, test_idx));
}

#[test]
fn learning_rate_steps_down() {
    let cfg = TrainConfig::paper(0);
    assert_eq!(cfg.lr_at(0), 8e-7);
    assert_eq!(cfg.lr_at(99), 8e-7);
    assert_eq!(cfg.lr_at(100), 4e-7);
    assert_eq!(cfg.lr_at(250), 2e-7);
}

#[test]
fn rank_correlation() {
    assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]) - 1.0).abs() < 1e-12);
    assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    // ranks with ties: [1.5, 1.5, 3] against [1, 2, 3]
    let r = spearman(&[5.0, 5.0, 7.0], &[1.0, 2.0, 3.0]);
    assert!((r - 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn profiles_have_expected_widths() {
    let p = ModelConfig::paper(0);
    assert_eq!((p.conv_dims.clone(), p.dense_dims.clone()), (vec![512, 512, 64], vec![1000, 200, 1]));
    assert_eq!(p.dropout, 0.1);
    let shapes = p.param_shapes();
    assert_eq!(shapes[0], (12, 512));
    assert_eq!(shapes.len(), 3 * 3 + 6 + 4);
}
