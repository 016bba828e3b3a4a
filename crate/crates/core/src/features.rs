//! Per-node embeddings for the predictor: 8 static columns describing edge
//! polarity and transform applicability, 4 dynamic one-hot columns recording
//! what a traversal actually did, and the graph edge list.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::aig::{Aig, NodeId};
use crate::error::{Error, Result};
use crate::transforms::{AppliedOp, AppliedRecord, DecisionVector, Engine, OpCode, TransformOptions};

/// Value written in every column of a primary input row.
pub const PI_SENTINEL: i32 = -99;
pub const STATIC_DIM: usize = 8;
pub const DYNAMIC_DIM: usize = 4;
pub const FEATURE_DIM: usize = STATIC_DIM + DYNAMIC_DIM;

pub const FEATURE_HEADER: &str =
    "node,left_inv,right_inv,rw_app,rw_gain,rs_app,rs_gain,rf_app,rf_gain,dyn_none,dyn_rw,dyn_rs,dyn_rf";

/// Rows of a feature matrix: the alive inputs and AND nodes in id order.
pub fn feature_nodes(aig: &Aig) -> Vec<NodeId> {
    (1..aig.num_slots() as NodeId)
        .filter(|&id| aig.is_alive(id) && (aig.is_input(id) || aig.is_and(id)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticFeatures {
    pub nodes: Vec<NodeId>,
    pub rows: Vec<[i32; STATIC_DIM]>,
}

impl StaticFeatures {
    pub fn row_of(&self, node: NodeId) -> Option<&[i32; STATIC_DIM]> {
        self.nodes.binary_search(&node).ok().map(|i| &self.rows[i])
    }

    /// Whether `op` was applicable at `node` (false for inputs).
    pub fn applicable(&self, node: NodeId, op: OpCode) -> bool {
        self.row_of(node).is_some_and(|r| r[2 + 2 * op.code() as usize] == 1)
    }

    /// Applicability triple per node id (indexed by id, `[rw, rs, rf]`).
    pub fn flags(&self, num_slots: usize) -> Vec<[bool; 3]> {
        let mut out = vec![[false; 3]; num_slots];
        for (&id, r) in self.nodes.iter().zip(&self.rows) {
            if r[0] != PI_SENTINEL {
                out[id as usize] = [r[2] == 1, r[4] == 1, r[6] == 1];
            }
        }
        out
    }
}

/// Probes every transform at every AND node of the unmodified graph.
pub fn static_features(aig: &Aig, opts: &TransformOptions) -> Result<StaticFeatures> {
    Engine::new(opts.clone())?;
    let nodes = feature_nodes(aig);
    let chunk = nodes.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(16);
    let rows: Vec<[i32; STATIC_DIM]> = nodes
        .par_chunks(chunk)
        .flat_map_iter(|part| {
            let mut g = aig.clone();
            let mut engine = Engine::new(opts.clone()).expect("options validated above");
            part.iter()
                .map(|&id| {
                    if !g.is_and(id) {
                        return [PI_SENTINEL; STATIC_DIM];
                    }
                    let (a, b) = g.fanins(id);
                    let mut r = [a.is_complemented() as i32, b.is_complemented() as i32, 0, -1, 0, -1, 0, -1];
                    for op in OpCode::ALL {
                        if let Some(plan) = engine.try_op(&mut g, id, op) {
                            let k = 2 + 2 * op.code() as usize;
                            r[k] = 1;
                            r[k + 1] = plan.gain as i32;
                        }
                    }
                    r
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(StaticFeatures { nodes, rows })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicFeatures {
    pub nodes: Vec<NodeId>,
    pub rows: Vec<[i32; DYNAMIC_DIM]>,
}

impl DynamicFeatures {
    /// Rows for a graph on which nothing was applied.
    pub fn untouched(aig: &Aig, nodes: &[NodeId]) -> Self {
        let rows = nodes
            .iter()
            .map(|&id| if aig.is_and(id) { one_hot(AppliedOp::None) } else { [PI_SENTINEL; DYNAMIC_DIM] })
            .collect();
        DynamicFeatures { nodes: nodes.to_vec(), rows }
    }
}

fn one_hot(op: AppliedOp) -> [i32; DYNAMIC_DIM] {
    let mut r = [0; DYNAMIC_DIM];
    r[op.index()] = 1;
    r
}

/// One-hot of the transform applied at each node during a traversal of `aig`.
pub fn dynamic_features(aig: &Aig, applied: &AppliedRecord) -> Result<DynamicFeatures> {
    if applied.ops.len() != aig.num_slots() || applied.original_size != aig.size() {
        return Err(Error::shape(format!(
            "applied record covers {} slots / size {}, graph has {} slots / size {}",
            applied.ops.len(),
            applied.original_size,
            aig.num_slots(),
            aig.size()
        )));
    }
    let nodes = feature_nodes(aig);
    let rows = nodes
        .iter()
        .map(|&id| if aig.is_and(id) { one_hot(applied.op(id)) } else { [PI_SENTINEL; DYNAMIC_DIM] })
        .collect();
    Ok(DynamicFeatures { nodes, rows })
}

/// Dynamic features predicted without running a traversal: the assigned
/// transform where it was statically applicable, none elsewhere.
pub fn projected_dynamic(stat: &StaticFeatures, d: &DecisionVector) -> DynamicFeatures {
    let rows = stat
        .nodes
        .iter()
        .zip(&stat.rows)
        .map(|(&id, r)| {
            if r[0] == PI_SENTINEL {
                return [PI_SENTINEL; DYNAMIC_DIM];
            }
            let op = d.get(id);
            if r[2 + 2 * op.code() as usize] == 1 {
                one_hot(op.into())
            } else {
                one_hot(AppliedOp::None)
            }
        })
        .collect();
    DynamicFeatures { nodes: stat.nodes.clone(), rows }
}

/// Edge list in feature-row numbering: one `(fanin, node)` pair per AND
/// fanin, plus the reverse pair when undirected.
pub fn edge_list(aig: &Aig, nodes: &[NodeId], directed: bool) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for (i, &id) in nodes.iter().enumerate() {
        if !aig.is_and(id) {
            continue;
        }
        let (a, b) = aig.fanins(id);
        for l in [a, b] {
            // Constant fanins have no row.
            let Ok(j) = nodes.binary_search(&l.node()) else { continue };
            edges.push((j as u32, i as u32));
            if !directed {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

/// Features and structure of one sample, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSample {
    pub nodes: Vec<NodeId>,
    /// Row-numbered edges.
    pub edges: Vec<(u32, u32)>,
    /// `nodes.len()` rows of [`FEATURE_DIM`] columns.
    pub features: Vec<[i32; FEATURE_DIM]>,
}

impl GraphSample {
    pub fn new(edges: Vec<(u32, u32)>, stat: &StaticFeatures, dynamic: &DynamicFeatures) -> Result<Self> {
        if stat.nodes != dynamic.nodes {
            return Err(Error::shape("static and dynamic features cover different nodes"));
        }
        let n = stat.nodes.len() as u32;
        if let Some(e) = edges.iter().find(|e| e.0 >= n || e.1 >= n) {
            return Err(Error::shape(format!("edge {} {} outside {n} rows", e.0, e.1)));
        }
        let features = stat
            .rows
            .iter()
            .zip(&dynamic.rows)
            .map(|(s, d)| {
                let mut r = [0; FEATURE_DIM];
                r[..STATIC_DIM].copy_from_slice(s);
                r[STATIC_DIM..].copy_from_slice(d);
                r
            })
            .collect();
        Ok(GraphSample { nodes: stat.nodes.clone(), edges, features })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Edge file text: `src dst` per line, original node ids.
pub fn edges_to_text(nodes: &[NodeId], edges: &[(u32, u32)]) -> String {
    let mut s = String::with_capacity(edges.len() * 10);
    for &(a, b) in edges {
        writeln!(s, "{} {}", nodes[a as usize], nodes[b as usize]).unwrap();
    }
    s
}

pub fn features_to_csv(nodes: &[NodeId], features: &[[i32; FEATURE_DIM]]) -> String {
    let mut s = String::with_capacity(features.len() * 40);
    s.push_str(FEATURE_HEADER);
    s.push('\n');
    for (id, r) in nodes.iter().zip(features) {
        write!(s, "{id}").unwrap();
        for v in r {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn features_from_csv(text: &str) -> Result<(Vec<NodeId>, Vec<[i32; FEATURE_DIM]>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == FEATURE_HEADER => {}
        other => return Err(Error::shape(format!("unexpected feature header {other:?}"))),
    }
    let mut nodes = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || Error::shape(format!("feature row {}: `{line}`", i + 2));
        let mut it = line.split(',').map(|f| f.trim().parse::<i64>());
        let id = it.next().and_then(|v| v.ok()).ok_or_else(bad)?;
        let mut r = [0; FEATURE_DIM];
        for slot in r.iter_mut() {
            *slot = it.next().and_then(|v| v.ok()).ok_or_else(bad)? as i32;
        }
        if it.next().is_some() {
            return Err(bad());
        }
        nodes.push(id as NodeId);
        rows.push(r);
    }
    Ok((nodes, rows))
}

pub fn edges_from_text(text: &str, nodes: &[NodeId]) -> Result<Vec<(u32, u32)>> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || Error::shape(format!("edge line {}: `{line}`", i + 1));
        let mut it = line.split_whitespace().map(|f| f.parse::<NodeId>());
        let (Some(Ok(a)), Some(Ok(b)), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let ra = nodes.binary_search(&a).map_err(|_| bad())?;
        let rb = nodes.binary_search(&b).map_err(|_| bad())?;
        edges.push((ra as u32, rb as u32));
    }
    Ok(edges)
}

/// Writes the edge list and the feature matrix to two files.
pub fn export_sample(sample: &GraphSample, edges_path: &Path, features_path: &Path) -> Result<()> {
    fs::write(edges_path, edges_to_text(&sample.nodes, &sample.edges))?;
    fs::write(features_path, features_to_csv(&sample.nodes, &sample.features))?;
    Ok(())
}

pub fn import_sample(edges_path: &Path, features_path: &Path) -> Result<GraphSample> {
    let (nodes, features) = features_from_csv(&fs::read_to_string(features_path)?)?;
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::shape("feature rows must be in ascending node order"));
    }
    let edges = edges_from_text(&fs::read_to_string(edges_path)?, &nodes)?;
    Ok(GraphSample { nodes, edges, features })
}
