//! Random and priority-guided decision vectors, their evaluation into
//! labeled samples, and per-design label normalization.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::aig::{check_equivalence, Aig, EquivalenceMode, NodeId, Verdict};
use crate::error::{Error, Result};
use crate::features::StaticFeatures;
use crate::transforms::{orchestrated_traversal, AppliedRecord, DecisionVector, OpCode, TransformOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Uniform,
    PriorityGuided,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::PriorityGuided => "priority",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which strategies a batch uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrategyMix {
    Uniform,
    PriorityGuided,
    /// The first `round(count * uniform_share)` samples are uniform, the rest guided.
    Mixed { uniform_share: f64 },
}

impl FromStr for StrategyMix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(StrategyMix::Uniform),
            "priority" | "priority-guided" => Ok(StrategyMix::PriorityGuided),
            "mixed" => Ok(StrategyMix::Mixed { uniform_share: 0.5 }),
            _ => Err(Error::config(format!("unknown strategy `{s}` (expected uniform, priority or mixed)"))),
        }
    }
}

pub const FRACTION_CHOICES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub mix: StrategyMix,
    pub priority: [OpCode; 3],
    /// Share of AND nodes re-randomized in guided samples; `None` draws it
    /// per sample from [`FRACTION_CHOICES`].
    pub fraction: Option<f64>,
    pub seed: u64,
    pub count: usize,
    /// Check every traversal result against the input graph.
    pub verify: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            mix: StrategyMix::Mixed { uniform_share: 0.5 },
            priority: [OpCode::Rw, OpCode::Rs, OpCode::Rf],
            fraction: None,
            seed: 1,
            count: 600,
            verify: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.fraction {
            if !(0.1..=0.9).contains(&p) {
                return Err(Error::config(format!("sampling fraction {p} outside [0.1, 0.9]")));
            }
        }
        if let StrategyMix::Mixed { uniform_share } = self.mix {
            if !(0.0..=1.0).contains(&uniform_share) {
                return Err(Error::config(format!("uniform share {uniform_share} outside [0, 1]")));
            }
        }
        let mut p = self.priority.map(|o| o.code());
        p.sort_unstable();
        if p != [0, 1, 2] {
            return Err(Error::config("priority order must be a permutation of rw, rs, rf"));
        }
        Ok(())
    }

    pub fn strategy_of(&self, index: usize) -> Strategy {
        match self.mix {
            StrategyMix::Uniform => Strategy::Uniform,
            StrategyMix::PriorityGuided => Strategy::PriorityGuided,
            StrategyMix::Mixed { uniform_share } => {
                if index < (self.count as f64 * uniform_share).round() as usize {
                    Strategy::Uniform
                } else {
                    Strategy::PriorityGuided
                }
            }
        }
    }
}

/// Independent generator for sample `index` of a batch seeded with `seed`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_code<R: Rng>(rng: &mut R) -> OpCode {
    OpCode::ALL[rng.gen_range(0..3)]
}

/// Every entry independently uniform over the three transforms.
pub fn random_decision_vector<R: Rng>(n: usize, rng: &mut R) -> DecisionVector {
    DecisionVector::new((0..n).map(|_| random_code(rng)).collect())
}

/// Each node takes its highest-priority statically applicable transform (a
/// random one where none applies), then `ceil(fraction * N)` randomly chosen
/// AND nodes are reassigned uniformly. `flags` is indexed by node id.
pub fn priority_guided_vector<R: Rng>(
    aig: &Aig,
    flags: &[[bool; 3]],
    priority: [OpCode; 3],
    fraction: f64,
    rng: &mut R,
) -> Result<DecisionVector> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::config(format!("sampling fraction {fraction} outside [0, 1]")));
    }
    if flags.len() != aig.num_slots() {
        return Err(Error::shape(format!("{} applicability rows for {} slots", flags.len(), aig.num_slots())));
    }
    let mut d = random_decision_vector(DecisionVector::len_for(aig), rng);
    let ands: Vec<NodeId> = aig.and_nodes().collect();
    for &id in &ands {
        let f = flags[id as usize];
        if let Some(&op) = priority.iter().find(|op| f[op.code() as usize]) {
            d.set(id, op);
        }
    }
    let k = ((fraction * ands.len() as f64).ceil() as usize).min(ands.len());
    for i in sample_indices(rng, ands.len(), k).into_vec() {
        d.set(ands[i], random_code(rng));
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub design_id: String,
    pub index: usize,
    pub strategy: Strategy,
    pub decisions: DecisionVector,
    pub applied: AppliedRecord,
    pub reduction: usize,
    /// Filled in by [`normalize_labels`].
    pub label: f64,
}

/// Decision vector for sample `index` of a batch.
pub fn draw_vector(aig: &Aig, flags: &[[bool; 3]], config: &SamplerConfig, index: usize) -> Result<DecisionVector> {
    let mut rng = sample_rng(config.seed, index);
    match config.strategy_of(index) {
        Strategy::Uniform => Ok(random_decision_vector(DecisionVector::len_for(aig), &mut rng)),
        Strategy::PriorityGuided => {
            let p = match config.fraction {
                Some(p) => p,
                None => FRACTION_CHOICES[rng.gen_range(0..FRACTION_CHOICES.len())],
            };
            priority_guided_vector(aig, flags, config.priority, p, &mut rng)
        }
    }
}

/// Designs with at most this many inputs are verified exhaustively.
pub const VERIFY_EXHAUSTIVE_PIS: usize = 16;

/// Random patterns (in 64-bit words) used above [`VERIFY_EXHAUSTIVE_PIS`]: 10048.
pub const VERIFY_RANDOM_WORDS: usize = 157;

/// Exhaustive check for small designs, 10k random patterns otherwise (an
/// `Inconclusive` verdict).
pub fn verify_equivalent(original: &Aig, optimized: &Aig, seed: u64) -> Result<Verdict> {
    let mode = if original.num_inputs() <= VERIFY_EXHAUSTIVE_PIS {
        EquivalenceMode::Exhaustive
    } else {
        EquivalenceMode::Random { words: VERIFY_RANDOM_WORDS, seed }
    };
    check_equivalence(original, optimized, mode)
}

/// Draws `config.count` vectors and evaluates each with a traversal.
/// Labels are left at zero; see [`normalize_labels`].
pub fn build_dataset(
    aig: &Aig,
    design_id: &str,
    stat: &StaticFeatures,
    config: &SamplerConfig,
    opts: &TransformOptions,
) -> Result<Vec<SampleRecord>> {
    config.validate()?;
    let flags = stat.flags(aig.num_slots());
    (0..config.count)
        .into_par_iter()
        .map(|i| {
            let decisions = draw_vector(aig, &flags, config, i)?;
            let (opt, applied) = orchestrated_traversal(aig, &decisions, opts)?;
            if config.verify {
                if let Verdict::Counterexample(cex) = verify_equivalent(aig, &opt, config.seed)? {
                    return Err(Error::Equivalence(format!(
                        "sample {i} of {design_id} changed the function (counterexample {cex:?})"
                    )));
                }
            }
            Ok(SampleRecord {
                design_id: design_id.to_string(),
                index: i,
                strategy: config.strategy_of(i),
                decisions,
                reduction: applied.total_reduction,
                applied,
                label: 0.0,
            })
        })
        .collect()
}

/// Label of each reduction relative to the best one: `(best - r) / best`,
/// or zero for every sample when nothing was reduced.
pub fn normalized_labels(reductions: &[usize]) -> Vec<f64> {
    let best = reductions.iter().copied().max().unwrap_or(0);
    reductions
        .iter()
        .map(|&r| if best == 0 { 0.0 } else { (best - r) as f64 / best as f64 })
        .collect()
}

pub fn normalize_labels(records: &mut [SampleRecord]) {
    let reductions: Vec<usize> = records.iter().map(|r| r.reduction).collect();
    for (r, l) in records.iter_mut().zip(normalized_labels(&reductions)) {
        r.label = l;
    }
}
