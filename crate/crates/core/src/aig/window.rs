//! Cones between a root and a leaf set, and reconvergence-driven cuts.

use super::{Aig, NodeId};
use crate::error::{Error, Result};

/// AND nodes strictly between `leaves` and `root` (root included unless it is
/// itself a leaf), in topological order. Fails if an input that is not a leaf
/// is reachable from the root without crossing a leaf.
pub fn cone_nodes(aig: &Aig, root: NodeId, leaves: &[NodeId]) -> Result<Vec<NodeId>> {
    cone_nodes_checked(aig, root, leaves)
}

pub(crate) fn cone_nodes_checked(aig: &Aig, root: NodeId, leaves: &[NodeId]) -> Result<Vec<NodeId>> {
    let mut order = Vec::new();
    let mut seen: Vec<NodeId> = leaves.to_vec();
    seen.push(0);
    let mut stack = vec![(root, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            order.push(v);
            continue;
        }
        if seen.contains(&v) {
            continue;
        }
        if !aig.is_and(v) {
            return Err(Error::shape(format!("n{v} reachable from n{root} outside the cut")));
        }
        seen.push(v);
        stack.push((v, true));
        let (a, b) = aig.fanins(v);
        stack.push((b.node(), false));
        stack.push((a.node(), false));
    }
    Ok(order)
}

/// Grows a cut of `root` from its fanins by repeatedly expanding the leaf
/// whose expansion adds the fewest new leaves (ties to the smallest index),
/// while the cut stays within `limit` leaves. Inputs are never expanded.
/// Returns sorted leaves.
pub fn reconvergent_cut(aig: &Aig, root: NodeId, limit: usize) -> Vec<NodeId> {
    assert!(aig.is_and(root));
    let mut visited: Vec<NodeId> = vec![root, 0];
    let mut leaves: Vec<NodeId> = Vec::new();
    let (a, b) = aig.fanins(root);
    for f in [a.node(), b.node()] {
        if !visited.contains(&f) {
            visited.push(f);
            leaves.push(f);
        }
    }
    loop {
        let mut best: Option<(i64, NodeId)> = None;
        for &l in &leaves {
            if !aig.is_and(l) {
                continue;
            }
            let (x, y) = aig.fanins(l);
            let mut added = 0i64;
            if !visited.contains(&x.node()) {
                added += 1;
            }
            if y.node() != x.node() && !visited.contains(&y.node()) {
                added += 1;
            }
            let cost = added - 1;
            if best.is_none_or(|(c, id)| cost < c || (cost == c && l < id)) {
                best = Some((cost, l));
            }
        }
        let Some((cost, l)) = best else { break };
        if leaves.len() as i64 + cost > limit as i64 {
            break;
        }
        leaves.retain(|&x| x != l);
        let (x, y) = aig.fanins(l);
        for f in [x.node(), y.node()] {
            if !visited.contains(&f) {
                visited.push(f);
                leaves.push(f);
            }
        }
    }
    leaves.sort_unstable();
    leaves
}
