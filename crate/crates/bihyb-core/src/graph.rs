//! Graph types shared by all three problems.
//!
//! Nodes are dense indices in `[0, node_count)`; callers that need names keep
//! their own symbol table and never leak strings into the solvers. All graph
//! values are plain data: modification helpers (`with_edge`,
//! `with_toggled_edge`) return a new graph and leave the receiver untouched,
//! which is what lets search code hold many variants of one instance cheaply
//! and safely.
//!
//! `WeightedDigraph` is the directed workhorse (DAG precedence, observation
//! edge lists). `LabeledGraph` is the undirected node-labeled form used by
//! graph edit distance. `DagInstance` and `HcpInstance` bundle a graph with
//! the problem data that gives it meaning.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{CoreError, Result};

/// Dense node index.
pub type NodeId = usize;

// ─────────────────────────────────────────────────────────────────────────────
// WeightedDigraph
// ─────────────────────────────────────────────────────────────────────────────

/// Simple directed graph with a non-negative integer weight per edge.
///
/// Invariants: no self-loops, at most one edge per ordered pair. Weights are
/// fixed-point values owned by the caller (DAG precedence edges leave them 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    out: Vec<Vec<(NodeId, u64)>>,
    ins: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl WeightedDigraph {
    /// Creates a graph with `node_count` nodes and no edges.
    pub fn new(node_count: usize) -> Self {
        WeightedDigraph {
            out: vec![Vec::new(); node_count],
            ins: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if node >= self.node_count() {
            return Err(CoreError::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }

    /// Inserts edge `src -> dst`. Rejects self-loops, duplicates, and
    /// out-of-range endpoints.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, weight: u64) -> Result<()> {
        self.check_node(src)?;
        self.check_node(dst)?;
        if src == dst {
            return Err(CoreError::Contract("self-loops are not allowed"));
        }
        let row = &mut self.out[src];
        match row.binary_search_by_key(&dst, |&(d, _)| d) {
            Ok(_) => Err(CoreError::Contract("duplicate edge")),
            Err(pos) => {
                row.insert(pos, (dst, weight));
                let ins = &mut self.ins[dst];
                let ipos = ins.binary_search(&src).unwrap_err();
                ins.insert(ipos, src);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    /// Returns a copy of the graph with edge `src -> dst` added.
    pub fn with_edge(&self, src: NodeId, dst: NodeId, weight: u64) -> Result<Self> {
        let mut g = self.clone();
        g.add_edge(src, dst, weight)?;
        Ok(g)
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        src < self.node_count()
            && self.out[src].binary_search_by_key(&dst, |&(d, _)| d).is_ok()
    }

    /// Outgoing `(dst, weight)` pairs of `node`, ascending by destination.
    pub fn successors(&self, node: NodeId) -> &[(NodeId, u64)] {
        &self.out[node]
    }

    /// Incoming sources of `node`, ascending.
    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        &self.ins[node]
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.ins[node].len()
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out[node].len()
    }

    /// All edges as `(src, dst, weight)`, ascending by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(v, w)| (u, v, w)))
    }

    /// Same nodes, every edge flipped, weights preserved.
    pub fn reverse(&self) -> Self {
        let mut g = WeightedDigraph::new(self.node_count());
        for (u, v, w) in self.edges() {
            g.add_edge(v, u, w).expect("reversing cannot break simple-graph invariants");
        }
        g
    }

    /// Kahn's algorithm; true when no directed cycle exists.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = (0..self.node_count()).map(|v| self.in_degree(v)).collect();
        let mut queue: Vec<NodeId> =
            (0..self.node_count()).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0usize;
        while let Some(u) = queue.pop() {
            seen += 1;
            for &(v, _) in self.successors(u) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
        seen == self.node_count()
    }

    /// Deterministic topological order: among ready nodes, lowest id first.
    ///
    /// On a cyclic graph returns `CycleDetected` carrying one edge inside the
    /// unresolvable residue.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_degree(v)).collect();
        let mut heap: BinaryHeap<Reverse<NodeId>> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        let mut done = vec![false; n];
        while let Some(Reverse(u)) = heap.pop() {
            order.push(u);
            done[u] = true;
            for &(v, _) in self.successors(u) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    heap.push(Reverse(v));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        for u in 0..n {
            if !done[u] {
                for &(v, _) in self.successors(u) {
                    if !done[v] {
                        return Err(CoreError::CycleDetected { src: u, dst: v });
                    }
                }
            }
        }
        unreachable!("residue of Kahn's algorithm always contains an internal edge")
    }

    /// Would adding `src -> dst` close a directed cycle? True exactly when
    /// `dst` already reaches `src`. Rejects self-loops and bad endpoints
    /// before looking at connectivity.
    pub fn would_create_cycle(&self, src: NodeId, dst: NodeId) -> Result<bool> {
        self.check_node(src)?;
        self.check_node(dst)?;
        if src == dst {
            return Err(CoreError::Contract("self-loops are not allowed"));
        }
        let mut stack = vec![dst];
        let mut seen = vec![false; self.node_count()];
        seen[dst] = true;
        while let Some(u) = stack.pop() {
            if u == src {
                return Ok(true);
            }
            for &(v, _) in self.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        Ok(false)
    }

    /// Reflexive-transitive reachability as one bitset row per node: bit `j`
    /// of row `i` is set when `i` reaches `j`. Rows are `words()` long.
    ///
    /// Used to answer many `would_create_cycle` queries in O(1) each: adding
    /// `u -> v` closes a cycle exactly when row `v` has bit `u`.
    pub fn reachability(&self) -> Reachability {
        let n = self.node_count();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        // Process in reverse topological order when possible so each row is
        // the union of successor rows; fall back to per-node DFS on cycles.
        match self.topological_order() {
            Ok(order) => {
                let mut scratch = vec![0u64; words];
                for &u in order.iter().rev() {
                    scratch.iter_mut().for_each(|w| *w = 0);
                    scratch[u / 64] |= 1 << (u % 64);
                    for &(v, _) in self.successors(u) {
                        for w in 0..words {
                            scratch[w] |= rows[v * words + w];
                        }
                    }
                    rows[u * words..(u + 1) * words].copy_from_slice(&scratch);
                }
            }
            Err(_) => {
                for u in 0..n {
                    let mut stack = vec![u];
                    let mut seen = vec![false; n];
                    seen[u] = true;
                    while let Some(x) = stack.pop() {
                        rows[u * words + x / 64] |= 1 << (x % 64);
                        for &(v, _) in self.successors(x) {
                            if !seen[v] {
                                seen[v] = true;
                                stack.push(v);
                            }
                        }
                    }
                }
            }
        }
        Reachability { rows, words }
    }
}

/// Packed reachability matrix produced by [`WeightedDigraph::reachability`].
#[derive(Debug, Clone)]
pub struct Reachability {
    rows: Vec<u64>,
    words: usize,
}

impl Reachability {
    pub fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        self.rows[from * self.words + to / 64] >> (to % 64) & 1 == 1
    }
}

// ─────────────────────────────────────────────────────────────────────────────
// LabeledGraph
// ─────────────────────────────────────────────────────────────────────────────

/// Undirected simple graph with one integer label per node. Edges are
/// unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    labels: Vec<u32>,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl LabeledGraph {
    pub fn new(labels: Vec<u32>) -> Self {
        let n = labels.len();
        LabeledGraph {
            labels,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, node: NodeId) -> u32 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    fn check_pair(&self, u: NodeId, v: NodeId) -> Result<()> {
        let n = self.node_count();
        if u >= n {
            return Err(CoreError::NodeOutOfRange { node: u, node_count: n });
        }
        if v >= n {
            return Err(CoreError::NodeOutOfRange { node: v, node_count: n });
        }
        if u == v {
            return Err(CoreError::Contract("self-loops are not allowed"));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_pair(u, v)?;
        if self.has_edge(u, v) {
            return Err(CoreError::Contract("duplicate edge"));
        }
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Copy with edge `{u, v}` flipped: removed when present, added when
    /// absent. The node set and labels never change.
    pub fn with_toggled_edge(&self, u: NodeId, v: NodeId) -> Result<Self> {
        self.check_pair(u, v)?;
        let mut g = self.clone();
        if g.has_edge(u, v) {
            let pos = g.adj[u].binary_search(&v).unwrap();
            g.adj[u].remove(pos);
            let pos = g.adj[v].binary_search(&u).unwrap();
            g.adj[v].remove(pos);
            g.edge_count -= 1;
        } else {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

// ─────────────────────────────────────────────────────────────────────────────
// Problem instances
// ─────────────────────────────────────────────────────────────────────────────

/// Resource-constrained scheduling instance: an acyclic precedence graph, a
/// positive duration and resource demand per node, and one shared capacity.
///
/// Durations are fixed-point microseconds so makespans and rewards stay exact
/// integers. A multi-workflow instance is stored as the disjoint union of its
/// workflows in one graph; nothing downstream distinguishes components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagInstance {
    pub graph: WeightedDigraph,
    pub duration_us: Vec<u64>,
    pub resource: Vec<u64>,
    pub capacity: u64,
}

impl DagInstance {
    pub fn new(
        graph: WeightedDigraph,
        duration_us: Vec<u64>,
        resource: Vec<u64>,
        capacity: u64,
    ) -> Result<Self> {
        let n = graph.node_count();
        if duration_us.len() != n || resource.len() != n {
            return Err(CoreError::Contract("node attribute length mismatch"));
        }
        if capacity == 0 {
            return Err(CoreError::Contract("capacity must be positive"));
        }
        if duration_us.contains(&0) {
            return Err(CoreError::Contract("durations must be positive"));
        }
        if resource.iter().any(|&r| r == 0 || r > capacity) {
            return Err(CoreError::Contract("resource demand must be in 1..=capacity"));
        }
        if !graph.is_acyclic() {
            let (src, dst) = first_cycle_edge(&graph);
            return Err(CoreError::CycleDetected { src, dst });
        }
        Ok(DagInstance {
            graph,
            duration_us,
            resource,
            capacity,
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

fn first_cycle_edge(graph: &WeightedDigraph) -> (NodeId, NodeId) {
    match graph.topological_order() {
        Err(CoreError::CycleDetected { src, dst }) => (src, dst),
        _ => unreachable!("caller checks acyclicity first"),
    }
}

/// Hamiltonian-cycle instance: an undirected simple graph on `n >= 3` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HcpInstance {
    n: usize,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl HcpInstance {
    /// Builds from an edge list. Endpoint order and duplicates in the input
    /// are rejected only when they violate the simple-graph invariants.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if n < 3 {
            return Err(CoreError::Contract("hamiltonian cycle needs at least 3 nodes"));
        }
        let mut inst = HcpInstance {
            n,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        };
        for &(u, v) in edges {
            if u >= n {
                return Err(CoreError::NodeOutOfRange { node: u, node_count: n });
            }
            if v >= n {
                return Err(CoreError::NodeOutOfRange { node: v, node_count: n });
            }
            if u == v {
                return Err(CoreError::Contract("self-loops are not allowed"));
            }
            if inst.has_edge(u, v) {
                return Err(CoreError::Contract("duplicate edge"));
            }
            let pos = inst.adj[u].binary_search(&v).unwrap_err();
            inst.adj[u].insert(pos, v);
            let pos = inst.adj[v].binary_search(&u).unwrap_err();
            inst.adj[v].insert(pos, u);
            inst.edge_count += 1;
        }
        Ok(inst)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}
