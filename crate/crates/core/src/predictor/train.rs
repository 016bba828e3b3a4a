use std::fmt::Write as _;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{GraphInput, Mode, Model, Scaler};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// The learning rate is multiplied by `decay` every `decay_every` epochs.
    pub decay: f64,
    pub decay_every: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn paper(seed: u64) -> Self {
        TrainConfig {
            epochs: 1500,
            batch_size: 100,
            lr: 8e-7,
            decay: 0.5,
            decay_every: 100,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            test_fraction: 0.2,
            seed,
        }
    }

    pub fn reduced(seed: u64) -> Self {
        TrainConfig { lr: 1e-3, ..TrainConfig::paper(seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.decay_every == 0 {
            return Err(Error::config("epochs, batch size and decay period must be positive"));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::config(format!("learning rate {} must be finite and non-negative", self.lr)));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::config(format!("test fraction {} outside [0, 1)", self.test_fraction)));
        }
        Ok(())
    }

    /// Learning rate in effect during `epoch` (counted from 0).
    pub fn lr_at(&self, epoch: usize) -> f64 {
        self.lr * self.decay.powi((epoch / self.decay_every) as i32)
    }
}

/// Graphs with their labels and the design each came from.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub graphs: Vec<GraphInput>,
    pub labels: Vec<f64>,
    pub designs: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn push(&mut self, g: GraphInput, label: f64, design: &str) {
        self.graphs.push(g);
        self.labels.push(label);
        self.designs.push(design.to_string());
    }

    /// Seeded per-design split: `round(n * test_fraction)` samples of each
    /// design are held out. Returns (train, test) indices in ascending order.
    pub fn split(&self, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
        let mut order: Vec<&str> = Vec::new();
        for d in &self.designs {
            if !order.contains(&d.as_str()) {
                order.push(d);
            }
        }
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (k, design) in order.iter().enumerate() {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| self.designs[i] == *design).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            idx.shuffle(&mut rng);
            let n_test = (idx.len() as f64 * test_fraction).round() as usize;
            test.extend_from_slice(&idx[..n_test]);
            train.extend_from_slice(&idx[n_test..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        (train, test)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub lr: f64,
    pub train_loss: f64,
    /// Evaluation-mode loss on the held-out split (NaN without one).
    pub test_loss: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LossCurve {
    pub epochs: Vec<EpochStats>,
}

impl LossCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,lr,train_loss,test_loss\n");
        for e in &self.epochs {
            writeln!(s, "{},{:e},{:.9},{:.9}", e.epoch + 1, e.lr, e.train_loss, e.test_loss).unwrap();
        }
        s
    }

    /// Centered moving average of the test loss with the given half width.
    pub fn smoothed_test_loss(&self, half: usize) -> Vec<f64> {
        let v: Vec<f64> = self.epochs.iter().map(|e| e.test_loss).collect();
        (0..v.len())
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half + 1).min(v.len());
                v[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
            })
            .collect()
    }
}

/// Adaptive-moment optimizer state for every tensor of a model.
pub struct Adam {
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    t: i32,
}

impl Adam {
    pub fn new(model: &Model) -> Self {
        Adam { m: model.zero_grads(), v: model.zero_grads(), t: 0 }
    }

    pub fn step(&mut self, model: &mut Model, grads: &[Array2<f64>], lr: f64, cfg: &TrainConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for ((p, g), (m, v)) in model.params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            ndarray::Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + cfg.eps);
            });
        }
    }
}

/// Mean evaluation-mode loss over `idx`, in batches.
pub fn evaluate(model: &Model, data: &Dataset, idx: &[usize], batch: usize) -> Result<f64> {
    if idx.is_empty() {
        return Ok(f64::NAN);
    }
    let mut total = 0.0;
    for chunk in idx.chunks(batch.max(1)) {
        let graphs: Vec<&GraphInput> = chunk.iter().map(|&i| &data.graphs[i]).collect();
        let labels: Vec<f64> = chunk.iter().map(|&i| data.labels[i]).collect();
        total += model.loss(&graphs, &labels, Mode::Eval, 0)? * chunk.len() as f64;
    }
    Ok(total / idx.len() as f64)
}

/// Fits the feature scaler on the training split, then runs `cfg.epochs`
/// epochs of shuffled mini-batch training. A zero learning rate freezes the
/// model entirely, batch-norm running statistics included.
pub fn train(model: &mut Model, data: &Dataset, cfg: &TrainConfig) -> Result<LossCurve> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::config("empty training dataset"));
    }
    if let Some(l) = data.labels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::config(format!("label {l} outside [0, 1]")));
    }
    let (mut train_idx, test_idx) = data.split(cfg.test_fraction, cfg.seed);
    if train_idx.is_empty() {
        return Err(Error::config("training split is empty"));
    }
    let frozen = cfg.lr == 0.0;
    if !frozen {
        model.scaler = Scaler::fit(model.config.in_dim, train_idx.iter().map(|&i| &data.graphs[i]));
    }
    let mut adam = Adam::new(model);
    let mut curve = LossCurve::default();
    for epoch in 0..cfg.epochs {
        let lr = cfg.lr_at(epoch);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1 + epoch as u64);
        train_idx.shuffle(&mut rng);
        let mut total = 0.0;
        for (b, chunk) in train_idx.chunks(cfg.batch_size).enumerate() {
            let graphs: Vec<&GraphInput> = chunk.iter().map(|&i| &data.graphs[i]).collect();
            let labels: Vec<f64> = chunk.iter().map(|&i| data.labels[i]).collect();
            let dropout_seed = cfg.seed ^ ((epoch as u64) << 24 | b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let (loss, grads, stats) = model.loss_and_backward(&graphs, &labels, dropout_seed)?;
            total += loss * chunk.len() as f64;
            if !frozen {
                adam.step(model, &grads, lr, cfg);
                model.absorb_stats(&stats);
            }
        }
        let test_loss = evaluate(model, data, &test_idx, cfg.batch_size)?;
        curve.epochs.push(EpochStats { epoch, lr, train_loss: total / train_idx.len() as f64, test_loss });
    }
    Ok(curve)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman inputs differ in length");
    let ra = ranks(a);
    let rb = ranks(b);
    pearson(&ra, &rb)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa.sqrt() * sbb.sqrt())
}
