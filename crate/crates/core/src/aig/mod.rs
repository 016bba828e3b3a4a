//! And-Inverter Graph with structural hashing, reference counting and
//! journaled mutation.
//!
//! Node 0 is the constant-0 node, inputs follow in declaration order, and AND
//! nodes are appended as they are created. Node indices are never reused while
//! the graph is mutated; deleted nodes stay in place with `alive == false`
//! until the graph is compacted (on write, or via [`Aig::compact`]).

mod aiger;
mod cut;
mod literal;
mod sim;
mod window;

use rustc_hash::FxHashMap;

pub use aiger::{parse_aiger, parse_aiger_auto, read_aiger_file, write_aiger, write_aiger_file, AigerFormat};
pub use cut::{cut_truth_table, enumerate_cuts, Cut, CutCache, CutLeaves, MAX_CUT_SIZE};
pub(crate) use cut::cut_truth_word;
pub use literal::{Lit, NodeId};
pub use sim::{check_equivalence, simulate, EquivalenceMode, Verdict, EXHAUSTIVE_PI_LIMIT};
pub use window::{cone_nodes, reconvergent_cut};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Const,
    Input,
    And,
}

#[derive(Clone, Debug)]
struct Node {
    kind: NodeKind,
    fanin0: Lit,
    fanin1: Lit,
    level: u32,
    refs: u32,
    alive: bool,
}

/// Size and depth summary of a graph. Size counts alive AND nodes only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub size: usize,
    pub depth: u32,
    pub n_pis: usize,
    pub n_pos: usize,
}

#[derive(Clone, Debug)]
enum Undo {
    PushNode,
    Fanins(NodeId, Lit, Lit),
    Alive(NodeId, bool),
    Level(NodeId, u32),
    Refs(NodeId, u32),
    FanoutPush(NodeId),
    FanoutRemove(NodeId, usize, NodeId),
    StrashInsert(u64),
    StrashRemove(u64, NodeId),
    Output(usize, Lit),
}

#[inline]
fn strash_key(a: Lit, b: Lit) -> u64 {
    debug_assert!(a <= b);
    ((a.code() as u64) << 32) | b.code() as u64
}

/// Constant folding and idempotence for a two-input AND.
#[inline]
pub(crate) fn and_trivial(a: Lit, b: Lit) -> Option<Lit> {
    if a == b {
        Some(a)
    } else if a == !b || a == Lit::FALSE || b == Lit::FALSE {
        Some(Lit::FALSE)
    } else if a == Lit::TRUE {
        Some(b)
    } else if b == Lit::TRUE {
        Some(a)
    } else {
        None
    }
}

#[inline]
fn ordered(a: Lit, b: Lit) -> (Lit, Lit) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug)]
pub struct Aig {
    nodes: Vec<Node>,
    fanouts: Vec<Vec<NodeId>>,
    inputs: Vec<NodeId>,
    outputs: Vec<Lit>,
    strash: FxHashMap<u64, NodeId>,
    n_ands: usize,
    version: u64,
    journal: Option<Vec<Undo>>,
    trial_version: u64,
    touched: Vec<NodeId>,
    pub(crate) input_names: Vec<Option<String>>,
    pub(crate) output_names: Vec<Option<String>>,
    pub(crate) comment: Option<String>,
}

impl Default for Aig {
    fn default() -> Self {
        Self::new()
    }
}

impl Aig {
    pub fn new() -> Self {
        Aig {
            nodes: vec![Node {
                kind: NodeKind::Const,
                fanin0: Lit::FALSE,
                fanin1: Lit::FALSE,
                level: 0,
                refs: 0,
                alive: true,
            }],
            fanouts: vec![Vec::new()],
            inputs: Vec::new(),
            outputs: Vec::new(),
            strash: FxHashMap::default(),
            n_ands: 0,
            version: 0,
            journal: None,
            trial_version: 0,
            touched: Vec::new(),
            input_names: Vec::new(),
            output_names: Vec::new(),
            comment: None,
        }
    }

    // ----------------------------------------------------------------------
    // Queries

    /// Number of node slots, including the constant node and dead nodes.
    pub fn num_slots(&self) -> usize {
        self.nodes.len()
    }

    /// Number of alive AND nodes.
    pub fn size(&self) -> usize {
        self.n_ands
    }

    /// Largest level over the primary outputs.
    pub fn depth(&self) -> u32 {
        self.outputs.iter().map(|l| self.nodes[l.node() as usize].level).max().unwrap_or(0)
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            size: self.size(),
            depth: self.depth(),
            n_pis: self.inputs.len(),
            n_pos: self.outputs.len(),
        }
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    #[inline]
    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id as usize].kind
    }

    #[inline]
    pub fn is_and(&self, id: NodeId) -> bool {
        self.nodes[id as usize].kind == NodeKind::And
    }

    #[inline]
    pub fn is_input(&self, id: NodeId) -> bool {
        self.nodes[id as usize].kind == NodeKind::Input
    }

    #[inline]
    pub fn is_alive(&self, id: NodeId) -> bool {
        (id as usize) < self.nodes.len() && self.nodes[id as usize].alive
    }

    #[inline]
    pub fn fanins(&self, id: NodeId) -> (Lit, Lit) {
        let n = &self.nodes[id as usize];
        (n.fanin0, n.fanin1)
    }

    #[inline]
    pub fn level(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].level
    }

    /// Number of references: fanin edges from alive AND nodes plus outputs.
    #[inline]
    pub fn refs(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].refs
    }

    /// AND nodes using `id` as a fanin, one entry per edge.
    #[inline]
    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.fanouts[id as usize]
    }

    /// Incremented by every structural mutation; plans are tied to it.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn input_name(&self, i: usize) -> Option<&str> {
        self.input_names.get(i).and_then(|n| n.as_deref())
    }

    pub fn output_name(&self, i: usize) -> Option<&str> {
        self.output_names.get(i).and_then(|n| n.as_deref())
    }

    /// Alive AND nodes in ascending index order.
    pub fn and_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.alive && n.kind == NodeKind::And)
            .map(|(i, _)| i as NodeId)
    }

    /// Looks up the literal `make_and(a, b)` would return without creating
    /// anything: a folded constant/fanin, or an existing strashed node.
    pub fn lookup_and(&self, a: Lit, b: Lit) -> Option<Lit> {
        if let Some(l) = and_trivial(a, b) {
            return Some(l);
        }
        let (a, b) = ordered(a, b);
        self.strash.get(&strash_key(a, b)).map(|&id| Lit::positive(id))
    }

    /// Inputs first (declaration order), then alive AND nodes with every node
    /// after both of its fanins. For graphs whose indices are already
    /// topological this is ascending index order.
    pub fn topological_order(&self) -> Vec<NodeId> {
        let n = self.nodes.len();
        let mut order = Vec::with_capacity(self.inputs.len() + self.n_ands);
        order.extend_from_slice(&self.inputs);
        let mut done = vec![false; n];
        done[0] = true;
        for &i in &self.inputs {
            done[i as usize] = true;
        }
        let mut stack: Vec<(NodeId, bool)> = Vec::new();
        for id in 0..n as NodeId {
            let node = &self.nodes[id as usize];
            if done[id as usize] || !node.alive || node.kind != NodeKind::And {
                continue;
            }
            stack.push((id, false));
            while let Some((v, expanded)) = stack.pop() {
                if done[v as usize] {
                    continue;
                }
                if expanded {
                    done[v as usize] = true;
                    order.push(v);
                    continue;
                }
                stack.push((v, true));
                let (f0, f1) = self.fanins(v);
                for f in [f1, f0] {
                    if !done[f.node() as usize] {
                        stack.push((f.node(), false));
                    }
                }
            }
        }
        order
    }

    /// Whether every alive AND node has both fanins at smaller indices.
    pub fn is_index_topological(&self) -> bool {
        self.and_nodes().all(|id| {
            let (a, b) = self.fanins(id);
            a.node() < id && b.node() < id
        })
    }

    // ----------------------------------------------------------------------
    // Construction

    pub fn add_input(&mut self) -> Lit {
        assert!(self.journal.is_none(), "inputs cannot be added during a trial");
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            kind: NodeKind::Input,
            fanin0: Lit::FALSE,
            fanin1: Lit::FALSE,
            level: 0,
            refs: 0,
            alive: true,
        });
        self.fanouts.push(Vec::new());
        self.inputs.push(id);
        self.input_names.push(None);
        self.version += 1;
        Lit::positive(id)
    }

    pub fn add_output(&mut self, lit: Lit) -> usize {
        assert!(self.journal.is_none(), "outputs cannot be added during a trial");
        assert!(self.is_alive(lit.node()));
        self.nodes[lit.node() as usize].refs += 1;
        self.outputs.push(lit);
        self.output_names.push(None);
        self.version += 1;
        self.outputs.len() - 1
    }

    pub fn set_input_name(&mut self, i: usize, name: impl Into<String>) {
        self.input_names[i] = Some(name.into());
    }

    pub fn set_output_name(&mut self, i: usize, name: impl Into<String>) {
        self.output_names[i] = Some(name.into());
    }

    /// Structurally hashed AND with constant and idempotence folding.
    pub fn make_and(&mut self, a: Lit, b: Lit) -> Lit {
        debug_assert!(self.is_alive(a.node()) && self.is_alive(b.node()));
        if let Some(l) = and_trivial(a, b) {
            return l;
        }
        let (a, b) = ordered(a, b);
        if let Some(&id) = self.strash.get(&strash_key(a, b)) {
            return Lit::positive(id);
        }
        self.create_and(a, b)
    }

    pub fn make_or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.make_and(!a, !b)
    }

    pub fn make_xor(&mut self, a: Lit, b: Lit) -> Lit {
        let p = self.make_and(a, !b);
        let q = self.make_and(!a, b);
        self.make_or(p, q)
    }

    pub fn make_mux(&mut self, sel: Lit, then: Lit, other: Lit) -> Lit {
        let p = self.make_and(sel, then);
        let q = self.make_and(!sel, other);
        self.make_or(p, q)
    }

    /// Adds an AND node exactly as given: no folding and no strash reuse.
    /// Used when loading files, whose structure is preserved verbatim.
    pub fn add_and_raw(&mut self, a: Lit, b: Lit) -> Lit {
        let (a, b) = ordered(a, b);
        self.create_and(a, b)
    }

    fn create_and(&mut self, a: Lit, b: Lit) -> Lit {
        let id = self.nodes.len() as NodeId;
        let level = 1 + self.level(a.node()).max(self.level(b.node()));
        self.nodes.push(Node {
            kind: NodeKind::And,
            fanin0: a,
            fanin1: b,
            level,
            refs: 0,
            alive: true,
        });
        self.fanouts.push(Vec::new());
        self.n_ands += 1;
        self.log(Undo::PushNode);
        self.touched.push(id);
        for f in [a, b] {
            self.inc_ref(f.node());
            self.add_fanout(f.node(), id);
        }
        let key = strash_key(a, b);
        if !self.strash.contains_key(&key) {
            self.strash_insert(key, id);
        }
        self.bump();
        Lit::positive(id)
    }

    // ----------------------------------------------------------------------
    // Journaled primitives

    #[inline]
    fn log(&mut self, u: Undo) {
        if let Some(j) = self.journal.as_mut() {
            j.push(u);
        }
    }

    #[inline]
    fn bump(&mut self) {
        self.version += 1;
    }

    fn set_fanins(&mut self, id: NodeId, a: Lit, b: Lit) {
        let n = &self.nodes[id as usize];
        let u = Undo::Fanins(id, n.fanin0, n.fanin1);
        self.log(u);
        let n = &mut self.nodes[id as usize];
        n.fanin0 = a;
        n.fanin1 = b;
        self.touched.push(id);
    }

    fn set_alive(&mut self, id: NodeId, alive: bool) {
        let old = self.nodes[id as usize].alive;
        if old == alive {
            return;
        }
        self.log(Undo::Alive(id, old));
        self.nodes[id as usize].alive = alive;
        if self.nodes[id as usize].kind == NodeKind::And {
            if alive {
                self.n_ands += 1;
            } else {
                self.n_ands -= 1;
            }
        }
        self.touched.push(id);
    }

    fn set_level(&mut self, id: NodeId, level: u32) {
        let old = self.nodes[id as usize].level;
        if old != level {
            self.log(Undo::Level(id, old));
            self.nodes[id as usize].level = level;
        }
    }

    fn inc_ref(&mut self, id: NodeId) {
        let old = self.nodes[id as usize].refs;
        self.log(Undo::Refs(id, old));
        self.nodes[id as usize].refs = old + 1;
    }

    fn dec_ref(&mut self, id: NodeId) {
        let old = self.nodes[id as usize].refs;
        debug_assert!(old > 0, "reference underflow on n{id}");
        self.log(Undo::Refs(id, old));
        self.nodes[id as usize].refs = old - 1;
    }

    fn add_fanout(&mut self, id: NodeId, fanout: NodeId) {
        self.fanouts[id as usize].push(fanout);
        self.log(Undo::FanoutPush(id));
    }

    fn remove_fanout(&mut self, id: NodeId, fanout: NodeId) {
        let list = &mut self.fanouts[id as usize];
        let pos = list.iter().position(|&f| f == fanout).expect("fanout edge missing");
        list.remove(pos);
        self.log(Undo::FanoutRemove(id, pos, fanout));
    }

    fn strash_insert(&mut self, key: u64, id: NodeId) {
        self.strash.insert(key, id);
        self.log(Undo::StrashInsert(key));
    }

    fn strash_remove_if(&mut self, key: u64, id: NodeId) {
        if self.strash.get(&key) == Some(&id) {
            self.strash.remove(&key);
            self.log(Undo::StrashRemove(key, id));
        }
    }

    fn set_output(&mut self, i: usize, lit: Lit) {
        let old = self.outputs[i];
        self.log(Undo::Output(i, old));
        self.outputs[i] = lit;
    }

    // ----------------------------------------------------------------------
    // Trials

    /// Starts recording mutations so that [`Aig::rollback`] can undo them.
    pub fn begin_trial(&mut self) {
        assert!(self.journal.is_none(), "nested trials are not supported");
        self.journal = Some(Vec::new());
        self.trial_version = self.version;
    }

    /// Undoes every mutation since [`Aig::begin_trial`], restoring the exact
    /// prior state (including fanout list order and the version counter).
    pub fn rollback(&mut self) {
        let journal = self.journal.take().expect("rollback without an open trial");
        for u in journal.into_iter().rev() {
            match u {
                Undo::PushNode => {
                    let node = self.nodes.pop().expect("journal out of sync");
                    self.fanouts.pop();
                    if node.alive && node.kind == NodeKind::And {
                        self.n_ands -= 1;
                    }
                    self.touched.push(self.nodes.len() as NodeId);
                }
                Undo::Fanins(id, a, b) => {
                    let n = &mut self.nodes[id as usize];
                    n.fanin0 = a;
                    n.fanin1 = b;
                    self.touched.push(id);
                }
                Undo::Alive(id, alive) => {
                    let n = &mut self.nodes[id as usize];
                    if n.alive != alive && n.kind == NodeKind::And {
                        if alive {
                            self.n_ands += 1;
                        } else {
                            self.n_ands -= 1;
                        }
                    }
                    n.alive = alive;
                    self.touched.push(id);
                }
                Undo::Level(id, level) => self.nodes[id as usize].level = level,
                Undo::Refs(id, refs) => self.nodes[id as usize].refs = refs,
                Undo::FanoutPush(id) => {
                    self.fanouts[id as usize].pop();
                }
                Undo::FanoutRemove(id, pos, fanout) => self.fanouts[id as usize].insert(pos, fanout),
                Undo::StrashInsert(key) => {
                    self.strash.remove(&key);
                }
                Undo::StrashRemove(key, id) => {
                    self.strash.insert(key, id);
                }
                Undo::Output(i, lit) => self.outputs[i] = lit,
            }
        }
        self.version = self.trial_version;
    }

    /// Keeps the mutations made since [`Aig::begin_trial`].
    pub fn commit(&mut self) {
        self.journal.take().expect("commit without an open trial");
    }

    pub fn in_trial(&self) -> bool {
        self.journal.is_some()
    }

    /// Nodes created, deleted, or rewired since the last call.
    pub fn drain_touched(&mut self) -> Vec<NodeId> {
        std::mem::take(&mut self.touched)
    }

    // ----------------------------------------------------------------------
    // Mutation

    /// Redirects every reference to `old` (fanouts and outputs) to `new`,
    /// then deletes `old` together with the logic only it used.
    ///
    /// Fanouts that become trivial or structurally identical to an existing
    /// node are merged in turn, so structural hashing stays canonical.
    /// `new` must not lie in the transitive fanout of `old`.
    pub fn replace(&mut self, old: NodeId, new: Lit) {
        assert!(self.is_and(old), "only AND nodes can be replaced");
        if new.node() == old {
            assert!(!new.is_complemented(), "cannot replace a node by its complement");
            return;
        }
        let mut stack = vec![(old, new)];
        let mut merged: FxHashMap<NodeId, Lit> = FxHashMap::default();
        let mut dropped = Vec::new();
        while let Some((o, mut n)) = stack.pop() {
            while let Some(&r) = merged.get(&n.node()) {
                n = r ^ n.is_complemented();
            }
            if !self.is_alive(o) || merged.contains_key(&o) || n.node() == o {
                continue;
            }
            merged.insert(o, n);
            dropped.push(o);
            debug_assert!(self.is_alive(n.node()), "replacement n{} is dead", n.node());
            for i in 0..self.outputs.len() {
                let out = self.outputs[i];
                if out.node() == o {
                    self.set_output(i, n ^ out.is_complemented());
                    self.inc_ref(n.node());
                    self.dec_ref(o);
                }
            }
            let mut fos = self.fanouts[o as usize].clone();
            fos.dedup();
            let mut seen: Vec<NodeId> = Vec::with_capacity(fos.len());
            for f in fos {
                if seen.contains(&f) || !self.is_alive(f) || merged.contains_key(&f) {
                    continue;
                }
                seen.push(f);
                let (a, b) = self.fanins(f);
                self.strash_remove_if(strash_key(a, b), f);
                let mut fan = [a, b];
                for l in fan.iter_mut() {
                    if l.node() == o {
                        *l = n ^ l.is_complemented();
                        self.dec_ref(o);
                        self.remove_fanout(o, f);
                        self.inc_ref(n.node());
                        self.add_fanout(n.node(), f);
                    }
                }
                let (a, b) = ordered(fan[0], fan[1]);
                self.set_fanins(f, a, b);
                if let Some(s) = and_trivial(a, b) {
                    stack.push((f, s));
                    continue;
                }
                let key = strash_key(a, b);
                match self.strash.get(&key) {
                    Some(&g) if g != f => stack.push((f, Lit::positive(g))),
                    Some(_) => {}
                    None => {
                        self.strash_insert(key, f);
                        self.update_levels(f);
                    }
                }
            }
        }
        for o in dropped {
            if self.is_alive(o) && self.refs(o) == 0 {
                self.delete_cascade(o);
            }
        }
        self.bump();
    }

    /// Recomputes the level of `start` and propagates changes to its fanouts.
    fn update_levels(&mut self, start: NodeId) {
        let mut work = vec![start];
        while let Some(id) = work.pop() {
            if !self.is_alive(id) || !self.is_and(id) {
                continue;
            }
            let (a, b) = self.fanins(id);
            let lvl = 1 + self.level(a.node()).max(self.level(b.node()));
            if lvl != self.level(id) {
                self.set_level(id, lvl);
                work.extend_from_slice(&self.fanouts[id as usize]);
            }
        }
    }

    /// Deletes `root` if it is an unreferenced AND node, then any fanin that
    /// becomes unreferenced as a result. Returns the number of nodes removed.
    pub fn delete_cascade(&mut self, root: NodeId) -> usize {
        let mut removed = 0;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if !node.alive || node.kind != NodeKind::And || node.refs != 0 {
                continue;
            }
            let (a, b) = (node.fanin0, node.fanin1);
            self.set_alive(id, false);
            self.strash_remove_if(strash_key(a, b), id);
            for f in [a, b] {
                self.dec_ref(f.node());
                self.remove_fanout(f.node(), id);
                if self.refs(f.node()) == 0 && self.is_and(f.node()) {
                    stack.push(f.node());
                }
            }
            removed += 1;
        }
        if removed > 0 {
            self.bump();
        }
        removed
    }

    /// Marks dead every AND node not reachable backward from an output.
    /// Returns the number of nodes removed.
    pub fn sweep_dangling(&mut self) -> usize {
        let reach = self.reachable_from_outputs();
        let mut removed = 0;
        for id in (0..self.nodes.len() as NodeId).rev() {
            if self.is_alive(id) && self.is_and(id) && !reach[id as usize] && self.refs(id) == 0 {
                removed += self.delete_cascade(id);
            }
        }
        debug_assert_eq!(self.and_nodes().filter(|&i| !reach[i as usize]).count(), 0);
        removed
    }

    pub(crate) fn reachable_from_outputs(&self) -> Vec<bool> {
        let mut reach = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.outputs.iter().map(|l| l.node()).collect();
        while let Some(id) = stack.pop() {
            if reach[id as usize] {
                continue;
            }
            reach[id as usize] = true;
            if self.is_and(id) {
                let (a, b) = self.fanins(id);
                stack.push(a.node());
                stack.push(b.node());
            }
        }
        reach
    }

    // ----------------------------------------------------------------------
    // Maximum fanout-free cones

    /// Nodes that die with `root` when it loses all references, keeping the
    /// `boundary` nodes alive. `root` comes first; the graph is left unchanged.
    pub fn mffc(&mut self, root: NodeId, boundary: &[NodeId]) -> Vec<NodeId> {
        assert!(self.is_and(root) && self.is_alive(root));
        for &b in boundary {
            self.nodes[b as usize].refs += 1;
        }
        let mut cone = vec![root];
        let mut i = 0;
        while i < cone.len() {
            let (a, b) = self.fanins(cone[i]);
            for f in [a, b] {
                let n = &mut self.nodes[f.node() as usize];
                n.refs -= 1;
                if n.refs == 0 && n.kind == NodeKind::And {
                    cone.push(f.node());
                }
            }
            i += 1;
        }
        for &id in &cone {
            let (a, b) = self.fanins(id);
            self.nodes[a.node() as usize].refs += 1;
            self.nodes[b.node() as usize].refs += 1;
        }
        for &b in boundary {
            self.nodes[b as usize].refs -= 1;
        }
        cone
    }

    /// Size of the maximum fanout-free cone of `root`.
    pub fn mffc_size(&mut self, root: NodeId) -> usize {
        self.mffc(root, &[]).len()
    }

    // ----------------------------------------------------------------------
    // Whole-graph utilities

    /// Copy holding only alive nodes, inputs first and AND nodes in
    /// topological order, so that indices are topological again. Structure is
    /// copied verbatim. The second value maps old node ids to new literals.
    pub fn compact(&self) -> (Aig, Vec<Option<Lit>>) {
        let mut out = Aig::new();
        let mut map: Vec<Option<Lit>> = vec![None; self.nodes.len()];
        map[0] = Some(Lit::FALSE);
        for (i, &id) in self.inputs.iter().enumerate() {
            let l = out.add_input();
            out.input_names[i] = self.input_names[i].clone();
            map[id as usize] = Some(l);
        }
        for id in self.topological_order() {
            if !self.is_and(id) {
                continue;
            }
            let (a, b) = self.fanins(id);
            let ma = map[a.node() as usize].expect("fanin visited first") ^ a.is_complemented();
            let mb = map[b.node() as usize].expect("fanin visited first") ^ b.is_complemented();
            map[id as usize] = Some(out.add_and_raw(ma, mb));
        }
        for (i, &o) in self.outputs.iter().enumerate() {
            let l = map[o.node() as usize].expect("output driver alive") ^ o.is_complemented();
            out.add_output(l);
            out.output_names[i] = self.output_names[i].clone();
        }
        out.comment = self.comment.clone();
        (out, map)
    }

    /// Verifies every structural invariant; returns a description of the
    /// first violation. `strash_unique` additionally demands that no two alive
    /// AND nodes share a fanin pair (not guaranteed for verbatim-loaded files).
    pub fn check(&self, strash_unique: bool) -> Result<(), String> {
        let n = self.nodes.len();
        if self.nodes[0].kind != NodeKind::Const {
            return Err("node 0 is not the constant".into());
        }
        let mut refs = vec![0u32; n];
        let mut fanouts: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut ands = 0;
        let mut pairs: FxHashMap<u64, NodeId> = FxHashMap::default();
        for id in 0..n as NodeId {
            let node = &self.nodes[id as usize];
            if !node.alive || node.kind != NodeKind::And {
                continue;
            }
            ands += 1;
            let (a, b) = (node.fanin0, node.fanin1);
            if a > b {
                return Err(format!("n{id}: fanins not in canonical order"));
            }
            for f in [a, b] {
                if !self.is_alive(f.node()) {
                    return Err(format!("n{id}: fanin n{} is dead", f.node()));
                }
                refs[f.node() as usize] += 1;
                fanouts[f.node() as usize].push(id);
            }
            let lvl = 1 + self.level(a.node()).max(self.level(b.node()));
            if lvl != node.level {
                return Err(format!("n{id}: level {} but fanins give {lvl}", node.level));
            }
            if strash_unique {
                if and_trivial(a, b).is_some() {
                    return Err(format!("n{id}: trivial fanin pair"));
                }
                if let Some(other) = pairs.insert(strash_key(a, b), id) {
                    return Err(format!("n{id} and n{other} share a fanin pair"));
                }
                if self.strash.get(&strash_key(a, b)) != Some(&id) {
                    return Err(format!("n{id}: missing from the strash table"));
                }
            }
        }
        if ands != self.n_ands {
            return Err(format!("size counter {} but {} alive AND nodes", self.n_ands, ands));
        }
        for &o in &self.outputs {
            if !self.is_alive(o.node()) {
                return Err(format!("output drives dead n{}", o.node()));
            }
            refs[o.node() as usize] += 1;
        }
        for id in 0..n {
            if !self.nodes[id].alive {
                continue;
            }
            if refs[id] != self.nodes[id].refs {
                return Err(format!("n{id}: refs {} but {} references", self.nodes[id].refs, refs[id]));
            }
            let mut have = self.fanouts[id].clone();
            have.sort_unstable();
            fanouts[id].sort_unstable();
            if have != fanouts[id] {
                return Err(format!("n{id}: fanout list out of sync"));
            }
        }
        for (&key, &id) in &self.strash {
            let node = &self.nodes[id as usize];
            if !node.alive || strash_key(node.fanin0, node.fanin1) != key {
                return Err(format!("stale strash entry for n{id}"));
            }
        }
        // Acyclicity: a full topological order must exist.
        let order = self.topological_order();
        let mut pos = vec![usize::MAX; n];
        pos[0] = 0;
        for (i, &id) in order.iter().enumerate() {
            pos[id as usize] = i + 1;
        }
        for id in self.and_nodes() {
            let (a, b) = self.fanins(id);
            if pos[a.node() as usize] >= pos[id as usize] || pos[b.node() as usize] >= pos[id as usize] {
                return Err(format!("cycle through n{id}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_inputs() -> (Aig, Lit, Lit) {
        let mut g = Aig::new();
        let a = g.add_input();
        let b = g.add_input();
        (g, a, b)
    }

    #[test]
    fn make_and_folds_constants() {
        let (mut g, a, _) = two_inputs();
        assert_eq!(g.make_and(a, Lit::FALSE), Lit::FALSE);
        assert_eq!(g.make_and(a, Lit::TRUE), a);
        assert_eq!(g.make_and(a, a), a);
        assert_eq!(g.make_and(a, !a), Lit::FALSE);
        assert_eq!(g.size(), 0);
    }

    #[test]
    fn make_and_is_strashed() {
        let (mut g, a, b) = two_inputs();
        let x = g.make_and(a, !b);
        assert_eq!(g.size(), 1);
        let y = g.make_and(!b, a);
        assert_eq!(x, y);
        assert_eq!(g.size(), 1);
        assert_eq!(g.level(x.node()), 1);
        let (f0, f1) = g.fanins(x.node());
        assert!(f0.code() <= f1.code());
    }

    #[test]
    fn chain_mffc() {
        let mut g = Aig::new();
        let ins: Vec<Lit> = (0..4).map(|_| g.add_input()).collect();
        let n1 = g.make_and(ins[0], ins[1]);
        let n2 = g.make_and(n1, ins[2]);
        let n3 = g.make_and(n2, ins[3]);
        g.add_output(n3);
        assert_eq!(g.mffc_size(n3.node()), 3);
        assert_eq!(g.mffc_size(n1.node()), 1);
        g.check(true).unwrap();
    }

    #[test]
    fn mffc_of_node_over_shared_inputs() {
        let (mut g, a, b) = two_inputs();
        let x = g.make_and(a, b);
        let y = g.make_and(a, !b);
        g.add_output(x);
        g.add_output(y);
        assert_eq!(g.mffc_size(x.node()), 1);
    }

    #[test]
    fn sweep_removes_unused() {
        let (mut g, a, b) = two_inputs();
        let x = g.make_and(a, b);
        g.add_output(x);
        assert_eq!(g.sweep_dangling(), 0);
        g.make_and(!a, b);
        assert_eq!(g.size(), 2);
        assert_eq!(g.sweep_dangling(), 1);
        assert_eq!(g.size(), 1);
        assert_eq!(g.sweep_dangling(), 0);
        g.check(true).unwrap();
    }

    #[test]
    fn replace_merges_identical_fanouts() {
        // x = a&b, y = a&c (with c == b functionally after replacement)
        let mut g = Aig::new();
        let a = g.add_input();
        let b = g.add_input();
        let c = g.add_input();
        let bc = g.make_and(b, c);
        let x = g.make_and(a, b);
        let y = g.make_and(a, bc);
        let top = g.make_and(x, !y);
        g.add_output(top);
        g.add_output(y);
        assert_eq!(g.size(), 4);
        // Pretend bc == b: y becomes a&b == x, then top = x & !x = 0.
        g.replace(bc.node(), b);
        g.check(true).unwrap();
        assert_eq!(g.outputs()[0], Lit::FALSE);
        assert_eq!(g.outputs()[1], x);
        assert_eq!(g.size(), 1);
    }

    #[test]
    fn trial_rollback_restores_everything() {
        let mut g = Aig::new();
        let ins: Vec<Lit> = (0..3).map(|_| g.add_input()).collect();
        let p = g.make_and(ins[0], ins[1]);
        let q = g.make_and(p, ins[2]);
        let r = g.make_and(q, !ins[0]);
        g.add_output(r);
        g.add_output(q);
        let before = format!("{:?}", (&g.nodes.len(), &g.outputs, g.size(), g.version()));
        let fanouts = g.fanouts.clone();
        g.begin_trial();
        let t = g.make_and(ins[1], ins[2]);
        g.replace(q.node(), t);
        assert_ne!(g.outputs()[1], q);
        g.rollback();
        let after = format!("{:?}", (&g.nodes.len(), &g.outputs, g.size(), g.version()));
        assert_eq!(before, after);
        assert_eq!(fanouts, g.fanouts);
        g.check(true).unwrap();
        assert_eq!(g.lookup_and(ins[1], ins[2]), None);
    }

    #[test]
    fn topological_order_after_rewiring() {
        let mut g = Aig::new();
        let ins: Vec<Lit> = (0..3).map(|_| g.add_input()).collect();
        let p = g.make_and(ins[0], ins[1]);
        let q = g.make_and(p, ins[2]);
        g.add_output(q);
        let late = g.make_and(ins[0], !ins[1]);
        g.replace(p.node(), late);
        assert!(!g.is_index_topological());
        g.check(true).unwrap();
        let order = g.topological_order();
        assert_eq!(&order[..3], g.inputs());
        let (c, _) = g.compact();
        assert!(c.is_index_topological());
        assert_eq!(c.size(), 2);
    }
}
