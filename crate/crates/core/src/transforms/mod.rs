//! Local transforms (rewrite, resubstitution, refactor), their applicability
//! probes, and traversals that apply them node by node.

pub mod factor;
pub mod library;
pub mod npn;
pub mod recipe;
mod refactor;
mod resub;
mod rewrite;
pub mod sop;
mod traversal;

use std::fmt;
use std::str::FromStr;

use crate::aig::{Aig, CutCache, Lit, NodeId};
use crate::error::{Error, Result};

pub use recipe::{RLit, Recipe};
pub use traversal::{
    orchestrated_traversal, standalone_pass, AppliedOp, AppliedRecord, DecisionVector, Traversal,
};

/// Transform selector; the integer codes are part of the decision file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpCode {
    Rw = 0,
    Rs = 1,
    Rf = 2,
}

impl OpCode {
    pub const ALL: [OpCode; 3] = [OpCode::Rw, OpCode::Rs, OpCode::Rf];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<OpCode> {
        match c {
            0 => Some(OpCode::Rw),
            1 => Some(OpCode::Rs),
            2 => Some(OpCode::Rf),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpCode::Rw => "rw",
            OpCode::Rs => "rs",
            OpCode::Rf => "rf",
        }
    }
}

impl fmt::Display for OpCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rw" | "0" => Ok(OpCode::Rw),
            "rs" | "1" => Ok(OpCode::Rs),
            "rf" | "2" => Ok(OpCode::Rf),
            _ => Err(Error::config(format!("unknown transform `{s}` (expected rw, rs or rf)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    /// Smallest accepted gain.
    pub min_gain: i64,
    /// Accept zero-gain rewrites.
    pub rw_zero: bool,
    /// Accept zero-gain refactors that lower the root's level.
    pub rf_depth: bool,
    /// Reject rewrites that raise the root's level.
    pub rw_preserve_depth: bool,
    pub cut_size: usize,
    pub max_cuts: usize,
    pub rf_leaf_limit: usize,
    pub rs_leaf_limit: usize,
    pub rs_divisor_cap: usize,
    /// Candidates per probe whose exact gain is measured.
    pub trial_limit: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            min_gain: 1,
            rw_zero: false,
            rf_depth: false,
            rw_preserve_depth: false,
            cut_size: 4,
            max_cuts: 8,
            rf_leaf_limit: 10,
            rs_leaf_limit: 8,
            rs_divisor_cap: 64,
            trial_limit: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanDetail {
    Rewrite { leaves: Vec<NodeId>, class: u16, library_size: usize },
    Refactor { leaves: Vec<NodeId>, form: String },
    Resub { divisors: Vec<Lit> },
}

/// A checked local transform, valid for one graph version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformPlan {
    pub op: OpCode,
    pub root: NodeId,
    /// Exact size reduction the plan achieves when applied now.
    pub gain: i64,
    pub recipe: Recipe,
    pub detail: PlanDetail,
    pub version: u64,
}

/// Outcome of building a recipe in place of a root.
struct Trial {
    gain: i64,
    new_level: u32,
}

/// Builds `recipe`, redirects `root` to it and cleans up. Returns `None` if
/// the recipe reproduces the root itself.
fn execute(aig: &mut Aig, root: NodeId, recipe: &Recipe) -> Option<Trial> {
    let before = aig.size() as i64;
    let first_new = aig.num_slots() as NodeId;
    let lit = recipe.build(aig, root)?;
    if lit.node() == root {
        return None;
    }
    let new_level = aig.level(lit.node());
    aig.replace(root, lit);
    for id in first_new..aig.num_slots() as NodeId {
        if aig.is_alive(id) && aig.refs(id) == 0 {
            aig.delete_cascade(id);
        }
    }
    Some(Trial { gain: before - aig.size() as i64, new_level })
}

fn measure(aig: &mut Aig, root: NodeId, recipe: &Recipe) -> Option<Trial> {
    aig.begin_trial();
    let t = execute(aig, root, recipe);
    aig.rollback();
    t
}

/// Applies a plan produced against the graph's current version and returns
/// the realized gain, which equals `plan.gain`.
pub fn apply_plan(aig: &mut Aig, plan: &TransformPlan) -> Result<i64> {
    if plan.version != aig.version() {
        return Err(Error::StalePlan { plan: plan.version, graph: aig.version() });
    }
    if !aig.is_alive(plan.root) || !aig.is_and(plan.root) {
        return Err(Error::config(format!("plan root n{} is not an alive AND node", plan.root)));
    }
    let t = execute(aig, plan.root, &plan.recipe)
        .ok_or_else(|| Error::config("plan recipe reproduces its root"))?;
    debug_assert_eq!(t.gain, plan.gain, "realized gain differs from the probed gain");
    Ok(t.gain)
}

struct Candidate {
    recipe: Recipe,
    detail: PlanDetail,
    estimate: i64,
    /// Tie-break key: cut size, then leaf indices.
    leaves: Vec<NodeId>,
}

/// Probes transforms on one graph, caching cuts across calls.
pub struct Engine {
    pub opts: TransformOptions,
    cuts: CutCache,
}

impl Engine {
    pub fn new(opts: TransformOptions) -> Result<Self> {
        if opts.min_gain < 0 {
            return Err(Error::config("min_gain must be non-negative"));
        }
        let cuts = CutCache::new(opts.cut_size, opts.max_cuts)?;
        Ok(Engine { opts, cuts })
    }

    pub fn try_op(&mut self, aig: &mut Aig, node: NodeId, op: OpCode) -> Option<TransformPlan> {
        assert!(aig.is_alive(node) && aig.is_and(node), "n{node} is not an alive AND node");
        match op {
            OpCode::Rw => self.try_rewrite(aig, node),
            OpCode::Rs => self.try_resub(aig, node),
            OpCode::Rf => self.try_refactor(aig, node),
        }
    }

    fn accepts(&self, op: OpCode, t: &Trial, root_level: u32) -> bool {
        match op {
            OpCode::Rw => {
                if self.opts.rw_preserve_depth && t.new_level > root_level {
                    return false;
                }
                t.gain >= self.opts.min_gain || (self.opts.rw_zero && t.gain >= 0)
            }
            OpCode::Rf => t.gain >= self.opts.min_gain || (self.opts.rf_depth && t.gain >= 0 && t.new_level < root_level),
            OpCode::Rs => t.gain >= self.opts.min_gain,
        }
    }

    /// Measures the most promising candidates exactly and keeps the best.
    fn choose(&self, aig: &mut Aig, root: NodeId, op: OpCode, mut cands: Vec<Candidate>) -> Option<TransformPlan> {
        cands.sort_by(|a, b| {
            b.estimate
                .cmp(&a.estimate)
                .then(a.leaves.len().cmp(&b.leaves.len()))
                .then_with(|| a.leaves.cmp(&b.leaves))
        });
        let root_level = aig.level(root);
        let mut best: Option<(i64, Candidate)> = None;
        for c in cands.into_iter().take(self.opts.trial_limit) {
            let Some(t) = measure(aig, root, &c.recipe) else { continue };
            if !self.accepts(op, &t, root_level) {
                continue;
            }
            if best.as_ref().is_none_or(|(g, _)| t.gain > *g) {
                best = Some((t.gain, c));
            }
        }
        best.map(|(gain, c)| TransformPlan {
            op,
            root,
            gain,
            recipe: c.recipe,
            detail: c.detail,
            version: aig.version(),
        })
    }
}

pub fn try_rewrite(aig: &mut Aig, node: NodeId, opts: &TransformOptions) -> Option<TransformPlan> {
    Engine::new(opts.clone()).ok()?.try_rewrite(aig, node)
}

pub fn try_resub(aig: &mut Aig, node: NodeId, opts: &TransformOptions) -> Option<TransformPlan> {
    Engine::new(opts.clone()).ok()?.try_resub(aig, node)
}

pub fn try_refactor(aig: &mut Aig, node: NodeId, opts: &TransformOptions) -> Option<TransformPlan> {
    Engine::new(opts.clone()).ok()?.try_refactor(aig, node)
}
