//! End-to-end optimization flow: sample decision vectors, score them with the
//! predictor, run exact traversals on the best-scored few, and compare with
//! the three standalone passes.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::aig::{Aig, Verdict};
use crate::error::{Error, Result};
use crate::features::{edge_list, projected_dynamic, static_features, GraphSample, StaticFeatures};
use crate::predictor::{features_matrix, Adjacency, GraphInput, Model};
use crate::sampling::{draw_vector, verify_equivalent, SamplerConfig};
use crate::transforms::{orchestrated_traversal, standalone_pass, DecisionVector, OpCode, TransformOptions};

pub const REPORT_HEADER: &str = "design,orig_size,rw,rs,rf,bg_mean,bg_best,impr_rw,impr_rs,impr_rf,verified,seconds";

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub sample_count: usize,
    pub top_k: usize,
    pub sampler: SamplerConfig,
    pub transforms: TransformOptions,
    /// Check every evaluated result against the input design.
    pub verify: bool,
    /// Evaluate every decision vector over the AND nodes instead of sampling
    /// when there are at most `sample_count` of them.
    pub enumerate_small: bool,
    /// Edge direction used for scoring; must match the model's training data.
    pub directed: bool,
    /// Report wall time; off keeps reports byte-reproducible.
    pub timing: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            sample_count: 600,
            top_k: 10,
            sampler: SamplerConfig::default(),
            transforms: TransformOptions::default(),
            verify: true,
            enumerate_small: true,
            directed: false,
            timing: false,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 || self.top_k == 0 || self.top_k > self.sample_count {
            return Err(Error::config(format!(
                "need 1 <= top_k ({}) <= sample_count ({})",
                self.top_k, self.sample_count
            )));
        }
        self.sampler.validate()
    }

    /// Applies `key = value` lines (`#` starts a comment) on top of `self`.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("config line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::config(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::config(format!("bad value `{v}` for {key}")))
        }
        match key {
            "sample_count" => self.sample_count = num(key, value)?,
            "top_k" => self.top_k = num(key, value)?,
            "seed" => self.sampler.seed = num(key, value)?,
            "strategy" => self.sampler.mix = value.parse()?,
            "fraction" => self.sampler.fraction = Some(num(key, value)?),
            "verify" => self.verify = num(key, value)?,
            "enumerate_small" => self.enumerate_small = num(key, value)?,
            "directed" => self.directed = num(key, value)?,
            "timing" => self.timing = num(key, value)?,
            _ => return Err(Error::config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

/// Sizes of the three standalone passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Baselines {
    pub rw: usize,
    pub rs: usize,
    pub rf: usize,
}

impl Baselines {
    pub fn get(&self, op: OpCode) -> usize {
        match op {
            OpCode::Rw => self.rw,
            OpCode::Rs => self.rs,
            OpCode::Rf => self.rf,
        }
    }

    pub fn min(&self) -> usize {
        self.rw.min(self.rs).min(self.rf)
    }
}

pub fn compare_baselines(aig: &Aig, opts: &TransformOptions) -> Result<Baselines> {
    let sizes: Vec<usize> = OpCode::ALL
        .par_iter()
        .map(|&op| standalone_pass(aig, op, opts).map(|(g, _)| g.size()))
        .collect::<Result<_>>()?;
    Ok(Baselines { rw: sizes[0], rs: sizes[1], rf: sizes[2] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verification {
    /// Every evaluated result was proven equivalent.
    Exhaustive,
    /// Random simulation found no difference.
    Random,
    Skipped,
}

/// One evaluated candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated {
    pub sample: usize,
    pub score: f64,
    pub size: usize,
    pub decisions: DecisionVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowRow {
    pub design: String,
    pub orig_size: usize,
    pub baselines: Baselines,
    /// Candidates in evaluation order (ascending score), failures excluded.
    pub evaluated: Vec<Evaluated>,
    pub verification: Verification,
    /// Candidates dropped because their result was not equivalent.
    pub rejected: usize,
    pub seconds: f64,
}

fn ratio(size: usize, orig: usize) -> f64 {
    if orig == 0 {
        1.0
    } else {
        size as f64 / orig as f64
    }
}

impl FlowRow {
    pub fn best(&self) -> Option<&Evaluated> {
        self.evaluated.iter().min_by_key(|e| (e.size, e.sample))
    }

    pub fn best_size(&self) -> usize {
        self.best().map_or(self.orig_size, |e| e.size)
    }

    pub fn mean_size(&self) -> f64 {
        if self.evaluated.is_empty() {
            return self.orig_size as f64;
        }
        self.evaluated.iter().map(|e| e.size as f64).sum::<f64>() / self.evaluated.len() as f64
    }

    pub fn baseline_ratio(&self, op: OpCode) -> f64 {
        ratio(self.baselines.get(op), self.orig_size)
    }

    pub fn best_ratio(&self) -> f64 {
        ratio(self.best_size(), self.orig_size)
    }

    pub fn mean_ratio(&self) -> f64 {
        if self.orig_size == 0 {
            1.0
        } else {
            self.mean_size() / self.orig_size as f64
        }
    }

    /// Baseline ratio minus the best flow ratio.
    pub fn improvement(&self, op: OpCode) -> f64 {
        self.baseline_ratio(op) - self.best_ratio()
    }

    pub fn verified_label(&self) -> String {
        let base = match self.verification {
            Verification::Exhaustive => "equivalent",
            Verification::Random => "random-10k",
            Verification::Skipped => "skipped",
        };
        if self.rejected > 0 {
            format!("{base};rejected={}", self.rejected)
        } else {
            base.to_string()
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{:.3}",
            self.design,
            self.orig_size,
            self.baseline_ratio(OpCode::Rw),
            self.baseline_ratio(OpCode::Rs),
            self.baseline_ratio(OpCode::Rf),
            self.mean_ratio(),
            self.best_ratio(),
            self.improvement(OpCode::Rw),
            self.improvement(OpCode::Rs),
            self.improvement(OpCode::Rf),
            self.verified_label(),
            self.seconds
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowReport {
    pub rows: Vec<FlowRow>,
}

impl FlowReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(REPORT_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv_line());
            s.push('\n');
        }
        s
    }

    /// Mean over designs of each baseline ratio minus the best flow ratio.
    pub fn mean_improvements(&self) -> [f64; 3] {
        let n = self.rows.len().max(1) as f64;
        OpCode::ALL.map(|op| self.rows.iter().map(|r| r.improvement(op)).sum::<f64>() / n)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            writeln!(
                s,
                "{}: {} -> best {} (mean {:.1}); rw {} rs {} rf {}; {}",
                r.design,
                r.orig_size,
                r.best_size(),
                r.mean_size(),
                r.baselines.rw,
                r.baselines.rs,
                r.baselines.rf,
                r.verified_label()
            )
            .unwrap();
        }
        let [a, b, c] = self.mean_improvements();
        writeln!(s, "mean improvement over rw {:.2}%, rs {:.2}%, rf {:.2}%", 100.0 * a, 100.0 * b, 100.0 * c).unwrap();
        s
    }
}

/// Every decision vector over the AND nodes of `aig` (other entries 0), in
/// lexicographic order of the AND entries.
pub fn all_vectors(aig: &Aig) -> Vec<DecisionVector> {
    let ands: Vec<_> = aig.and_nodes().collect();
    let total = 3usize.pow(ands.len() as u32);
    let mut out = Vec::with_capacity(total);
    let base = DecisionVector::constant(aig, OpCode::Rw);
    for mut code in 0..total {
        let mut d = base.clone();
        for &id in ands.iter().rev() {
            d.set(id, OpCode::ALL[code % 3]);
            code /= 3;
        }
        out.push(d);
    }
    out
}

/// 3^n when it does not exceed `limit`.
fn small_space(n: usize, limit: usize) -> Option<usize> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total.checked_mul(3)?;
        if total > limit {
            return None;
        }
    }
    Some(total)
}

/// Candidate vectors for a design: all of them for a small decision space,
/// otherwise `sample_count` draws from the sampler.
pub fn candidate_vectors(aig: &Aig, stat: &StaticFeatures, cfg: &FlowConfig) -> Result<Vec<DecisionVector>> {
    if cfg.enumerate_small && small_space(aig.size(), cfg.sample_count).is_some() {
        return Ok(all_vectors(aig));
    }
    let sampler = SamplerConfig { count: cfg.sample_count, ..cfg.sampler.clone() };
    let flags = stat.flags(aig.num_slots());
    (0..cfg.sample_count).into_par_iter().map(|i| draw_vector(aig, &flags, &sampler, i)).collect()
}

/// Predictor scores for decision vectors, from projected dynamic features.
pub fn score_vectors(aig: &Aig, stat: &StaticFeatures, vectors: &[DecisionVector], model: &Model, directed: bool) -> Result<Vec<f64>> {
    let edges = edge_list(aig, &stat.nodes, directed);
    let adj = Arc::new(Adjacency::new(stat.nodes.len(), &edges)?);
    let mut scores = Vec::with_capacity(vectors.len());
    for chunk in vectors.chunks(100) {
        let graphs: Vec<GraphInput> = chunk
            .iter()
            .map(|d| {
                let s = GraphSample::new(Vec::new(), stat, &projected_dynamic(stat, d))?;
                GraphInput::new(adj.clone(), features_matrix(&s.features))
            })
            .collect::<Result<_>>()?;
        let refs: Vec<&GraphInput> = graphs.iter().collect();
        scores.extend(model.predict(&refs)?);
    }
    Ok(scores)
}

/// Indices of the `k` lowest scores, ties broken by index.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

pub fn run_flow(aig: &Aig, design: &str, model: &Model, cfg: &FlowConfig) -> Result<FlowRow> {
    cfg.validate()?;
    let start = Instant::now();
    let stat = static_features(aig, &cfg.transforms)?;
    let vectors = candidate_vectors(aig, &stat, cfg)?;
    let scores = score_vectors(aig, &stat, &vectors, model, cfg.directed)?;
    let chosen = top_k(&scores, cfg.top_k);
    let results: Vec<(Evaluated, Option<Verdict>)> = chosen
        .par_iter()
        .map(|&i| {
            let (g, _) = orchestrated_traversal(aig, &vectors[i], &cfg.transforms)?;
            let verdict = if cfg.verify { Some(verify_equivalent(aig, &g, cfg.sampler.seed)?) } else { None };
            Ok((Evaluated { sample: i, score: scores[i], size: g.size(), decisions: vectors[i].clone() }, verdict))
        })
        .collect::<Result<_>>()?;
    let mut evaluated = Vec::new();
    let mut rejected = 0;
    let mut verification = if cfg.verify { Verification::Exhaustive } else { Verification::Skipped };
    for (e, v) in results {
        match v {
            Some(Verdict::Counterexample(_)) => rejected += 1,
            Some(Verdict::Inconclusive) => {
                verification = Verification::Random;
                evaluated.push(e);
            }
            _ => evaluated.push(e),
        }
    }
    let baselines = compare_baselines(aig, &cfg.transforms)?;
    Ok(FlowRow {
        design: design.to_string(),
        orig_size: aig.size(),
        baselines,
        evaluated,
        verification,
        rejected,
        seconds: if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 },
    })
}
