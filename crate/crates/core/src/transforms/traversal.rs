//! Single-pass traversals: every original AND node is visited once in
//! topological order and its assigned transform is applied if it qualifies.

use std::fmt::Write as _;

use super::{apply_plan, Engine, OpCode, TransformOptions};
use crate::aig::{Aig, NodeId};
use crate::error::{Error, Result};

/// One transform per non-constant node: entry `i` belongs to node `i + 1`.
/// Entries of input nodes are carried but ignored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecisionVector {
    codes: Vec<OpCode>,
}

impl DecisionVector {
    pub fn new(codes: Vec<OpCode>) -> Self {
        DecisionVector { codes }
    }

    /// The same transform for every node of `aig`.
    pub fn constant(aig: &Aig, op: OpCode) -> Self {
        DecisionVector { codes: vec![op; aig.num_slots() - 1] }
    }

    /// Expected length for a graph.
    pub fn len_for(aig: &Aig) -> usize {
        aig.num_slots() - 1
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[OpCode] {
        &self.codes
    }

    pub fn get(&self, node: NodeId) -> OpCode {
        self.codes[node as usize - 1]
    }

    pub fn set(&mut self, node: NodeId, op: OpCode) {
        self.codes[node as usize - 1] = op;
    }

    /// One code per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(2 * self.codes.len());
        for c in &self.codes {
            s.push((b'0' + c.code()) as char);
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut codes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let op = t
                .parse::<u8>()
                .ok()
                .and_then(OpCode::from_code)
                .ok_or_else(|| Error::config(format!("decision line {}: expected 0, 1 or 2, got `{t}`", i + 1)))?;
            codes.push(op);
        }
        Ok(DecisionVector { codes })
    }

    /// Run-length encoding such as `3*0,1*2`.
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.codes.len() {
            let c = self.codes[i];
            let mut j = i;
            while j < self.codes.len() && self.codes[j] == c {
                j += 1;
            }
            if !out.is_empty() {
                out.push(',');
            }
            write!(out, "{}*{}", j - i, c.code()).unwrap();
            i = j;
        }
        out
    }

    pub fn from_rle(s: &str) -> Result<Self> {
        let mut codes = Vec::new();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (n, c) = part
                .split_once('*')
                .ok_or_else(|| Error::config(format!("bad run `{part}`")))?;
            let n: usize = n.parse().map_err(|_| Error::config(format!("bad run `{part}`")))?;
            let op = c
                .parse::<u8>()
                .ok()
                .and_then(OpCode::from_code)
                .ok_or_else(|| Error::config(format!("bad run `{part}`")))?;
            codes.extend(std::iter::repeat_n(op, n));
        }
        Ok(DecisionVector { codes })
    }
}

/// What a traversal did at a node; the index is the dynamic feature column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AppliedOp {
    #[default]
    None = 0,
    Rw = 1,
    Rs = 2,
    Rf = 3,
}

impl AppliedOp {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AppliedOp::None => "none",
            AppliedOp::Rw => "rw",
            AppliedOp::Rs => "rs",
            AppliedOp::Rf => "rf",
        }
    }
}

impl From<OpCode> for AppliedOp {
    fn from(op: OpCode) -> Self {
        match op {
            OpCode::Rw => AppliedOp::Rw,
            OpCode::Rs => AppliedOp::Rs,
            OpCode::Rf => AppliedOp::Rf,
        }
    }
}

/// Per-node outcome of a traversal, indexed by the node ids of the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppliedRecord {
    pub ops: Vec<AppliedOp>,
    pub gains: Vec<i64>,
    /// AND nodes of the input graph (the rows of the CSV form).
    pub and_nodes: Vec<NodeId>,
    pub original_size: usize,
    pub final_size: usize,
    pub total_reduction: usize,
}

impl AppliedRecord {
    pub fn op(&self, node: NodeId) -> AppliedOp {
        self.ops[node as usize]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("node_index,applied_op,gain\n");
        for &id in &self.and_nodes {
            writeln!(s, "{},{},{}", id, self.ops[id as usize].name(), self.gains[id as usize]).unwrap();
        }
        s
    }
}

/// Reusable traversal settings.
#[derive(Clone, Debug, Default)]
pub struct Traversal {
    pub opts: TransformOptions,
}

impl Traversal {
    pub fn new(opts: TransformOptions) -> Self {
        Traversal { opts }
    }

    pub fn run(&self, aig: &Aig, d: &DecisionVector) -> Result<(Aig, AppliedRecord)> {
        if d.len() != DecisionVector::len_for(aig) {
            return Err(Error::shape(format!(
                "decision vector has {} entries, graph needs {}",
                d.len(),
                DecisionVector::len_for(aig)
            )));
        }
        let mut g = aig.clone();
        let mut engine = Engine::new(self.opts.clone())?;
        let slots = aig.num_slots();
        let mut ops = vec![AppliedOp::None; slots];
        let mut gains = vec![0i64; slots];
        let order: Vec<NodeId> = aig.topological_order().into_iter().filter(|&id| aig.is_and(id)).collect();
        for &v in &order {
            if !g.is_alive(v) {
                continue;
            }
            let op = d.get(v);
            if let Some(plan) = engine.try_op(&mut g, v, op) {
                let gain = apply_plan(&mut g, &plan)?;
                ops[v as usize] = op.into();
                gains[v as usize] = gain;
            }
        }
        let original_size = aig.size();
        let final_size = g.size();
        debug_assert_eq!(gains.iter().sum::<i64>(), original_size as i64 - final_size as i64);
        let record = AppliedRecord {
            ops,
            gains,
            and_nodes: order,
            original_size,
            final_size,
            total_reduction: original_size - final_size,
        };
        Ok((g, record))
    }
}

/// Applies `d[v]` at every original AND node `v` in topological order.
pub fn orchestrated_traversal(
    aig: &Aig,
    d: &DecisionVector,
    opts: &TransformOptions,
) -> Result<(Aig, AppliedRecord)> {
    Traversal::new(opts.clone()).run(aig, d)
}

/// The same traversal with one transform everywhere.
pub fn standalone_pass(aig: &Aig, op: OpCode, opts: &TransformOptions) -> Result<(Aig, AppliedRecord)> {
    orchestrated_traversal(aig, &DecisionVector::constant(aig, op), opts)
}
