use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, Axis, Zip};
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.1;
/// Graphs per deterministic gradient-accumulation chunk.
const CHUNK: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub in_dim: usize,
    /// Output width of each graph-convolution layer.
    pub conv_dims: Vec<usize>,
    /// Widths of the three dense layers; the last one is 1.
    pub dense_dims: Vec<usize>,
    pub dropout: f64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn paper(seed: u64) -> Self {
        ModelConfig { in_dim: FEATURE_DIM, conv_dims: vec![512, 512, 64], dense_dims: vec![1000, 200, 1], dropout: 0.1, seed }
    }

    /// Desk-scale profile used by default for training.
    pub fn reduced(seed: u64) -> Self {
        ModelConfig { in_dim: FEATURE_DIM, conv_dims: vec![64, 64, 32], dense_dims: vec![128, 32, 1], dropout: 0.1, seed }
    }

    /// Smallest profile, for finite-difference checks.
    pub fn tiny(seed: u64) -> Self {
        ModelConfig { in_dim: FEATURE_DIM, conv_dims: vec![8, 8, 4], dense_dims: vec![16, 8, 1], dropout: 0.1, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.in_dim == 0 || self.conv_dims.is_empty() || self.conv_dims.contains(&0) {
            return Err(Error::config("model dimensions must be positive and there must be a conv layer"));
        }
        if self.dense_dims.len() != 3 || self.dense_dims.contains(&0) || self.dense_dims[2] != 1 {
            return Err(Error::config("dense head needs three positive widths ending in 1"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        Ok(())
    }

    /// Shapes of the trainable tensors, in storage order: per conv layer the
    /// self weights, neighbor weights and bias; then the three dense weights
    /// and biases; then scale and shift of both batch-norm layers.
    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        let mut d = self.in_dim;
        for &o in &self.conv_dims {
            v.extend([(d, o), (d, o), (1, o)]);
            d = o;
        }
        for &o in &self.dense_dims {
            v.extend([(d, o), (1, o)]);
            d = o;
        }
        v.extend([(1, self.dense_dims[0]), (1, self.dense_dims[0]), (1, self.dense_dims[1]), (1, self.dense_dims[1])]);
        v
    }

    pub fn num_params(&self) -> usize {
        self.param_shapes().iter().map(|(a, b)| a * b).sum()
    }

    fn conv_layers(&self) -> usize {
        self.conv_dims.len()
    }

    fn dense_base(&self) -> usize {
        3 * self.conv_layers()
    }

    fn bn_base(&self) -> usize {
        self.dense_base() + 6
    }
}

/// Per-column affine standardization of raw feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaler {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

impl Scaler {
    pub fn identity(dim: usize) -> Self {
        Scaler { mean: Array1::zeros(dim), std: Array1::ones(dim) }
    }

    /// Mean and standard deviation over every row of every graph; constant
    /// columns keep unit scale.
    pub fn fit<'a>(dim: usize, graphs: impl IntoIterator<Item = &'a GraphInput>) -> Self {
        let mut sum = Array1::<f64>::zeros(dim);
        let mut sq = Array1::<f64>::zeros(dim);
        let mut n = 0usize;
        for g in graphs {
            sum += &g.x.sum_axis(Axis(0));
            sq += &g.x.mapv(|v| v * v).sum_axis(Axis(0));
            n += g.x.nrows();
        }
        if n == 0 {
            return Scaler::identity(dim);
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - &mean * &mean;
        let std = var.mapv(|v| if v > 1e-12 { v.sqrt() } else { 1.0 });
        Scaler { mean, std }
    }

    fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        (x - &self.mean) / &self.std
    }
}

/// In-neighbor lists: node `i` averages the rows listed for it.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Adjacency {
    /// `edges` are `(src, dst)` pairs; `dst` aggregates `src`.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(s, d) in edges {
            if s as usize >= n || d as usize >= n {
                return Err(Error::shape(format!("edge {s} {d} outside {n} nodes")));
            }
            deg[d as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; edges.len()];
        for &(s, d) in edges {
            neighbors[fill[d as usize]] = s;
            fill[d as usize] += 1;
        }
        Ok(Adjacency { offsets, neighbors })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    fn of(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Neighbor means. Each sum runs over the values in ascending order so
    /// the result does not depend on how nodes are numbered.
    fn mean(&self, h: &Array2<f64>) -> Array2<f64> {
        let (n, d) = h.dim();
        let mut out = Array2::zeros((n, d));
        let mut buf = Vec::new();
        for i in 0..n {
            let nb = self.of(i);
            if nb.is_empty() {
                continue;
            }
            let inv = 1.0 / nb.len() as f64;
            for c in 0..d {
                buf.clear();
                buf.extend(nb.iter().map(|&j| h[[j as usize, c]]));
                out[[i, c]] = sorted_sum(&mut buf) * inv;
            }
        }
        out
    }

    /// Transpose of [`Adjacency::mean`].
    fn mean_backward(&self, g: &Array2<f64>, dh: &mut Array2<f64>) {
        for i in 0..g.nrows() {
            let nb = self.of(i);
            if nb.is_empty() {
                continue;
            }
            let inv = 1.0 / nb.len() as f64;
            let gi = g.row(i);
            for &j in nb {
                dh.row_mut(j as usize).scaled_add(inv, &gi);
            }
        }
    }
}

fn sorted_sum(v: &mut [f64]) -> f64 {
    if v.len() > 2 {
        v.sort_unstable_by(f64::total_cmp);
    }
    v.iter().sum()
}

/// One graph ready for the network: structure and raw feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphInput {
    pub adj: Arc<Adjacency>,
    pub x: Array2<f64>,
}

impl GraphInput {
    pub fn new(adj: Arc<Adjacency>, x: Array2<f64>) -> Result<Self> {
        if adj.num_nodes() != x.nrows() {
            return Err(Error::shape(format!("{} feature rows for {} nodes", x.nrows(), adj.num_nodes())));
        }
        Ok(GraphInput { adj, x })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

fn relu6(v: f64) -> f64 {
    v.clamp(0.0, 6.0)
}

fn relu6_grad(v: f64) -> f64 {
    if v > 0.0 && v < 6.0 {
        1.0
    } else {
        0.0
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn add_row(m: &mut Array2<f64>, b: &Array2<f64>) {
    *m += &b.row(0);
}

/// Column means, summed in ascending value order.
fn pooled_mean(h: &Array2<f64>) -> Array1<f64> {
    let n = h.nrows().max(1) as f64;
    let mut buf = Vec::with_capacity(h.nrows());
    Array1::from_iter(h.columns().into_iter().map(|c| {
        buf.clear();
        buf.extend(c.iter().copied());
        sorted_sum(&mut buf) / n
    }))
}

struct ConvCache {
    inputs: Vec<Array2<f64>>,
    aggs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
    masks: Vec<Option<Array2<f64>>>,
    rows: usize,
}

struct BnCache {
    xhat: Array2<f64>,
    inv_std: Array1<f64>,
}

struct HeadCache {
    pooled: Array2<f64>,
    u1: Array2<f64>,
    bn0: BnCache,
    y1: Array2<f64>,
    bn1: BnCache,
    y2: Array2<f64>,
    scores: Array1<f64>,
}

/// Batch statistics of the two batch-norm layers from a training pass.
#[derive(Clone, Debug)]
pub struct BatchStats {
    pub mean: [Array1<f64>; 2],
    pub var: [Array1<f64>; 2],
    pub count: usize,
}

/// Gradient of the loss for every trainable tensor, in storage order.
pub type Gradients = Vec<Array2<f64>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub params: Vec<Array2<f64>>,
    pub running_mean: [Array1<f64>; 2],
    pub running_var: [Array1<f64>; 2],
    pub scaler: Scaler,
}

impl Model {
    /// Weights and biases uniform in `±sqrt(1 / fan_in)`; batch-norm scale
    /// 1, shift 0, running statistics (0, 1).
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = Vec::new();
        let mut fan_in = config.in_dim;
        let draw = |shape: (usize, usize), fan_in: usize, rng: &mut ChaCha8Rng| {
            let b = (1.0 / fan_in as f64).sqrt();
            let u = Uniform::new_inclusive(-b, b);
            Array2::from_shape_simple_fn(shape, || u.sample(rng))
        };
        for &o in &config.conv_dims {
            params.push(draw((fan_in, o), fan_in, &mut rng));
            params.push(draw((fan_in, o), fan_in, &mut rng));
            params.push(draw((1, o), fan_in, &mut rng));
            fan_in = o;
        }
        for &o in &config.dense_dims {
            params.push(draw((fan_in, o), fan_in, &mut rng));
            params.push(draw((1, o), fan_in, &mut rng));
            fan_in = o;
        }
        for &w in &config.dense_dims[..2] {
            params.push(Array2::ones((1, w)));
            params.push(Array2::zeros((1, w)));
        }
        let (w0, w1) = (config.dense_dims[0], config.dense_dims[1]);
        Ok(Model {
            running_mean: [Array1::zeros(w0), Array1::zeros(w1)],
            running_var: [Array1::ones(w0), Array1::ones(w1)],
            scaler: Scaler::identity(config.in_dim),
            params,
            config,
        })
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(|p| p.len()).sum()
    }

    pub fn zero_grads(&self) -> Gradients {
        self.params.iter().map(|p| Array2::zeros(p.dim())).collect()
    }

    fn check_input(&self, g: &GraphInput) -> Result<()> {
        if g.x.ncols() != self.config.in_dim {
            return Err(Error::shape(format!("{} feature columns, model expects {}", g.x.ncols(), self.config.in_dim)));
        }
        if g.x.nrows() == 0 {
            return Err(Error::shape("graph without nodes"));
        }
        Ok(())
    }

    fn conv_forward(&self, g: &GraphInput, mode: Mode, rng: Option<&mut ChaCha8Rng>) -> Result<(Array1<f64>, ConvCache)> {
        self.check_input(g)?;
        let mut h = self.scaler.apply(&g.x);
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scaled input"));
        }
        let mut cache = ConvCache { inputs: Vec::new(), aggs: Vec::new(), pre: Vec::new(), masks: Vec::new(), rows: h.nrows() };
        let p = self.config.dropout;
        let mut rng = rng;
        for l in 0..self.config.conv_layers() {
            let agg = g.adj.mean(&h);
            let mut z = h.dot(&self.params[3 * l]) + agg.dot(&self.params[3 * l + 1]);
            add_row(&mut z, &self.params[3 * l + 2]);
            let mut a = z.mapv(relu6);
            let mask = match (mode, rng.as_deref_mut()) {
                (Mode::Train, Some(r)) if p > 0.0 => {
                    let keep = 1.0 / (1.0 - p);
                    let m = Array2::from_shape_simple_fn(a.dim(), || if r.gen::<f64>() < p { 0.0 } else { keep });
                    a *= &m;
                    Some(m)
                }
                _ => None,
            };
            cache.inputs.push(h);
            cache.aggs.push(agg);
            cache.pre.push(z);
            cache.masks.push(mask);
            h = a;
        }
        Ok((pooled_mean(&h), cache))
    }

    fn conv_backward(&self, g: &GraphInput, cache: &ConvCache, dpooled: ArrayView1<f64>, grads: &mut Gradients) {
        let n = cache.rows;
        let mut dout = Array2::from_shape_fn((n, dpooled.len()), |(_, c)| dpooled[c] / n as f64);
        for l in (0..self.config.conv_layers()).rev() {
            if let Some(m) = &cache.masks[l] {
                dout *= m;
            }
            Zip::from(&mut dout).and(&cache.pre[l]).for_each(|d, &z| *d *= relu6_grad(z));
            let dz = dout;
            grads[3 * l] += &cache.inputs[l].t().dot(&dz);
            grads[3 * l + 1] += &cache.aggs[l].t().dot(&dz);
            grads[3 * l + 2] += &dz.sum_axis(Axis(0)).insert_axis(Axis(0));
            if l == 0 {
                break;
            }
            let mut dh = dz.dot(&self.params[3 * l].t());
            let dagg = dz.dot(&self.params[3 * l + 1].t());
            g.adj.mean_backward(&dagg, &mut dh);
            dout = dh;
        }
    }

    fn bn_forward(&self, j: usize, x: &Array2<f64>, mode: Mode) -> (Array2<f64>, BnCache, Array1<f64>, Array1<f64>) {
        let base = self.config.bn_base() + 2 * j;
        let (mean, var) = match mode {
            Mode::Train => {
                let mean = x.mean_axis(Axis(0)).expect("non-empty batch");
                let var = x.var_axis(Axis(0), 0.0);
                (mean, var)
            }
            Mode::Eval => (self.running_mean[j].clone(), self.running_var[j].clone()),
        };
        let inv_std = var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
        let xhat = (x - &mean) * &inv_std;
        let mut y = &xhat * &self.params[base].row(0);
        y += &self.params[base + 1].row(0);
        (y, BnCache { xhat, inv_std }, mean, var)
    }

    fn bn_backward(&self, j: usize, c: &BnCache, dy: &Array2<f64>, grads: &mut Gradients) -> Array2<f64> {
        let base = self.config.bn_base() + 2 * j;
        let b = dy.nrows() as f64;
        grads[base] += &(dy * &c.xhat).sum_axis(Axis(0)).insert_axis(Axis(0));
        grads[base + 1] += &dy.sum_axis(Axis(0)).insert_axis(Axis(0));
        let dxhat = dy * &self.params[base].row(0);
        let s1 = dxhat.sum_axis(Axis(0));
        let s2 = (&dxhat * &c.xhat).sum_axis(Axis(0));
        (dxhat * b - &s1 - &c.xhat * &s2) * &c.inv_std / b
    }

    fn head_forward(&self, pooled: Array2<f64>, mode: Mode) -> Result<(HeadCache, BatchStats)> {
        let d = self.config.dense_base();
        let mut u1 = pooled.dot(&self.params[d]);
        add_row(&mut u1, &self.params[d + 1]);
        let r1 = u1.mapv(relu6);
        let (y1, bn0, m0, v0) = self.bn_forward(0, &r1, mode);
        let mut u2 = y1.dot(&self.params[d + 2]);
        add_row(&mut u2, &self.params[d + 3]);
        let (y2, bn1, m1, v1) = self.bn_forward(1, &u2, mode);
        let mut u3 = y2.dot(&self.params[d + 4]);
        add_row(&mut u3, &self.params[d + 5]);
        if u3.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense head"));
        }
        let scores = u3.column(0).mapv(sigmoid);
        let count = pooled.nrows();
        Ok((
            HeadCache { pooled, u1, bn0, y1, bn1, y2, scores },
            BatchStats { mean: [m0, m1], var: [v0, v1], count },
        ))
    }

    /// Gradient of the loss w.r.t. the pooled embeddings; head gradients are
    /// accumulated into `grads`.
    fn head_backward(&self, c: &HeadCache, dscores: &Array1<f64>, grads: &mut Gradients) -> Array2<f64> {
        let d = self.config.dense_base();
        let du3 = (dscores * &c.scores.mapv(|s| s * (1.0 - s))).insert_axis(Axis(1));
        grads[d + 4] += &c.y2.t().dot(&du3);
        grads[d + 5] += &du3.sum_axis(Axis(0)).insert_axis(Axis(0));
        let dy2 = du3.dot(&self.params[d + 4].t());
        let du2 = self.bn_backward(1, &c.bn1, &dy2, grads);
        grads[d + 2] += &c.y1.t().dot(&du2);
        grads[d + 3] += &du2.sum_axis(Axis(0)).insert_axis(Axis(0));
        let dy1 = du2.dot(&self.params[d + 2].t());
        let mut du1 = self.bn_backward(0, &c.bn0, &dy1, grads);
        Zip::from(&mut du1).and(&c.u1).for_each(|g, &u| *g *= relu6_grad(u));
        grads[d] += &c.pooled.t().dot(&du1);
        grads[d + 1] += &du1.sum_axis(Axis(0)).insert_axis(Axis(0));
        du1.dot(&self.params[d].t())
    }

    fn pool_batch(&self, graphs: &[&GraphInput], mode: Mode, dropout_seed: u64) -> Result<(Array2<f64>, Vec<ConvCache>)> {
        let results: Vec<Result<(Array1<f64>, ConvCache)>> = graphs
            .par_iter()
            .enumerate()
            .map(|(i, g)| {
                let mut rng = ChaCha8Rng::seed_from_u64(dropout_seed);
                rng.set_stream(i as u64);
                self.conv_forward(g, mode, Some(&mut rng))
            })
            .collect();
        let width = *self.config.conv_dims.last().unwrap();
        let mut pooled = Array2::zeros((graphs.len(), width));
        let mut caches = Vec::with_capacity(graphs.len());
        for (i, r) in results.into_iter().enumerate() {
            let (p, c) = r?;
            pooled.row_mut(i).assign(&p);
            caches.push(c);
        }
        Ok((pooled, caches))
    }

    /// Scores in (0, 1) with dropout off and running batch-norm statistics.
    pub fn predict(&self, graphs: &[&GraphInput]) -> Result<Vec<f64>> {
        if graphs.is_empty() {
            return Ok(Vec::new());
        }
        let (pooled, _) = self.pool_batch(graphs, Mode::Eval, 0)?;
        let (head, _) = self.head_forward(pooled, Mode::Eval)?;
        Ok(head.scores.to_vec())
    }

    /// Mean squared error of the batch in the given mode. Dropout masks in
    /// training mode come from `dropout_seed`.
    pub fn loss(&self, graphs: &[&GraphInput], labels: &[f64], mode: Mode, dropout_seed: u64) -> Result<f64> {
        check_batch(graphs, labels)?;
        let (pooled, _) = self.pool_batch(graphs, mode, dropout_seed)?;
        let (head, _) = self.head_forward(pooled, mode)?;
        Ok(mse(&head.scores, labels))
    }

    /// Training-mode loss, its gradient for every tensor, and the batch
    /// statistics the running averages should absorb.
    pub fn loss_and_backward(
        &self,
        graphs: &[&GraphInput],
        labels: &[f64],
        dropout_seed: u64,
    ) -> Result<(f64, Gradients, BatchStats)> {
        check_batch(graphs, labels)?;
        let (pooled, caches) = self.pool_batch(graphs, Mode::Train, dropout_seed)?;
        let (head, stats) = self.head_forward(pooled, Mode::Train)?;
        let loss = mse(&head.scores, labels);
        let b = labels.len() as f64;
        let dscores = Array1::from_iter(head.scores.iter().zip(labels).map(|(s, y)| 2.0 * (s - y) / b));
        let mut grads = self.zero_grads();
        let dpooled = self.head_backward(&head, &dscores, &mut grads);
        let idx: Vec<usize> = (0..graphs.len()).collect();
        let partial: Vec<Gradients> = idx
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut g = self.zero_grads();
                for &i in chunk {
                    self.conv_backward(graphs[i], &caches[i], dpooled.row(i), &mut g);
                }
                g
            })
            .collect();
        for p in partial {
            for (a, b) in grads.iter_mut().zip(p) {
                *a += &b;
            }
        }
        Ok((loss, grads, stats))
    }

    /// Moves the running batch-norm statistics toward a training batch.
    pub fn absorb_stats(&mut self, s: &BatchStats) {
        let unbias = if s.count > 1 { s.count as f64 / (s.count - 1) as f64 } else { 1.0 };
        for j in 0..2 {
            self.running_mean[j] = &self.running_mean[j] * (1.0 - BN_MOMENTUM) + &s.mean[j] * BN_MOMENTUM;
            self.running_var[j] = &self.running_var[j] * (1.0 - BN_MOMENTUM) + &s.var[j] * (BN_MOMENTUM * unbias);
        }
    }
}

fn check_batch(graphs: &[&GraphInput], labels: &[f64]) -> Result<()> {
    if graphs.is_empty() {
        return Err(Error::shape("empty batch"));
    }
    if graphs.len() != labels.len() {
        return Err(Error::shape(format!("{} graphs with {} labels", graphs.len(), labels.len())));
    }
    Ok(())
}

fn mse(scores: &Array1<f64>, labels: &[f64]) -> f64 {
    scores.iter().zip(labels).map(|(s, y)| (s - y) * (s - y)).sum::<f64>() / labels.len() as f64
}

/// Integer feature rows as a network input matrix.
pub fn features_matrix(rows: &[[i32; FEATURE_DIM]]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), FEATURE_DIM), |(i, j)| rows[i][j] as f64)
}
