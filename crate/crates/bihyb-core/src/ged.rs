//! Graph edit distance between undirected node-labeled graphs.
//!
//! A candidate answer is a partial injective node mapping; `edit_cost` prices
//! it exactly under a unit-style cost model (relabel, node insert/delete, edge
//! insert/delete). Three solvers produce mappings:
//!
//! * `hungarian_ged` solves one linear assignment over a padded cost matrix
//!   whose entries fold in local degree information, then prices the induced
//!   mapping. Fast, crude.
//! * `ipfp_ged` runs Frank-Wolfe style projected descent on the quadratic
//!   relaxation of the padded assignment problem: linearize at the current
//!   doubly-stochastic iterate, solve an LSAP for a direction, take the exact
//!   quadratic line-search step, finally round with one more LSAP. Slower,
//!   much tighter.
//! * `brute_force_ged` enumerates every partial injective mapping (guarded to
//!   tiny sizes) and is the ground-truth oracle the others are tested against.
//!
//! Every solver returns both the mapping and the exact integer cost of that
//! mapping, so results can always be re-priced and audited with `edit_cost`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::graph::{LabeledGraph, NodeId};

/// Edit operation prices. `node_sub` applies only when labels differ;
/// mapping a node to an equally-labeled node is free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub node_sub: u64,
    pub node_indel: u64,
    pub edge_indel: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            node_sub: 1,
            node_indel: 1,
            edge_indel: 1,
        }
    }
}

/// Partial injective mapping from the nodes of one graph into another.
/// `None` deletes the source node; target nodes without a preimage are
/// insertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMapping {
    assign: Vec<Option<NodeId>>,
}

impl NodeMapping {
    /// Validates image range against `target_count` and injectivity.
    pub fn new(assign: Vec<Option<NodeId>>, target_count: usize) -> Result<Self> {
        let mut hit = vec![false; target_count];
        for j in assign.iter().flatten() {
            if *j >= target_count {
                return Err(CoreError::NodeOutOfRange {
                    node: *j,
                    node_count: target_count,
                });
            }
            if hit[*j] {
                return Err(CoreError::Contract("mapping must be injective"));
            }
            hit[*j] = true;
        }
        Ok(NodeMapping { assign })
    }

    pub fn assign(&self) -> &[Option<NodeId>] {
        &self.assign
    }

    pub fn image(&self, source: NodeId) -> Option<NodeId> {
        self.assign[source]
    }
}

/// A mapping together with its exact edit cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GedResult {
    pub mapping: NodeMapping,
    pub cost: u64,
}

/// Prices `mapping` exactly: relabels and node indels, plus one `edge_indel`
/// for every g1 edge whose image is not a g2 edge and every g2 edge without a
/// g1-edge preimage. Matched edges are free.
pub fn edit_cost(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    mapping: &NodeMapping,
    costs: &CostModel,
) -> Result<u64> {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    if mapping.assign.len() != n1 {
        return Err(CoreError::Contract("mapping length must equal source node count"));
    }
    let mut inverse: Vec<Option<NodeId>> = vec![None; n2];
    for (i, j) in mapping.assign.iter().enumerate() {
        if let Some(j) = *j {
            if j >= n2 {
                return Err(CoreError::NodeOutOfRange { node: j, node_count: n2 });
            }
            if inverse[j].is_some() {
                return Err(CoreError::Contract("mapping must be injective"));
            }
            inverse[j] = Some(i);
        }
    }

    let mut total = 0u64;
    let mut covered = 0usize;
    for i in 0..n1 {
        match mapping.assign[i] {
            Some(j) => {
                covered += 1;
                if g1.label(i) != g2.label(j) {
                    total += costs.node_sub;
                }
            }
            None => total += costs.node_indel,
        }
    }
    total += (n2 - covered) as u64 * costs.node_indel;

    for (u, v) in g1.edges() {
        let matched = match (mapping.assign[u], mapping.assign[v]) {
            (Some(p), Some(q)) => g2.has_edge(p, q),
            _ => false,
        };
        if !matched {
            total += costs.edge_indel;
        }
    }
    for (p, q) in g2.edges() {
        let matched = match (inverse[p], inverse[q]) {
            (Some(u), Some(v)) => g1.has_edge(u, v),
            _ => false,
        };
        if !matched {
            total += costs.edge_indel;
        }
    }
    Ok(total)
}

// ─────────────────────────────────────────────────────────────────────────────
// Linear assignment
// ─────────────────────────────────────────────────────────────────────────────

/// Dense row-major f64 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    fn dot(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Minimum-cost perfect matching on a square cost matrix via shortest
/// augmenting paths with potentials, O(n^3).
///
/// Entries must be finite. Returns the column assigned to each row and the
/// total cost. Ties are broken by the lowest column index encountered first,
/// scanning rows top to bottom, so results are deterministic.
pub fn hungarian_lsap(costs: &Matrix) -> Result<(Vec<usize>, f64)> {
    if costs.rows() != costs.cols() {
        return Err(CoreError::Contract("assignment matrix must be square"));
    }
    if costs.data.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::Contract("assignment matrix entries must be finite"));
    }
    let n = costs.rows();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    // 1-indexed potentials; p[j] is the row matched to column j, 0 = free.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        let mut way = vec![0usize; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = costs.at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| costs.at(i, assign[i])).sum();
    Ok((assign, total))
}

// ─────────────────────────────────────────────────────────────────────────────
// Bipartite approximation
// ─────────────────────────────────────────────────────────────────────────────

/// Large finite sentinel for forbidden assignment cells. Any feasible mapping
/// costs far less, so these cells are never selected.
const FORBIDDEN: f64 = 1e12;

fn sub_cost(g1: &LabeledGraph, g2: &LabeledGraph, i: NodeId, j: NodeId, c: &CostModel) -> u64 {
    if g1.label(i) != g2.label(j) {
        c.node_sub
    } else {
        0
    }
}

fn padded_cost_matrix(g1: &LabeledGraph, g2: &LabeledGraph, c: &CostModel) -> Matrix {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    let n = n1 + n2;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n2 {
            let degree_gap = g1.degree(i).abs_diff(g2.degree(j)) as u64;
            let cost = sub_cost(g1, g2, i, j, c) + c.edge_indel * degree_gap;
            m.set(i, j, cost as f64);
        }
        for j in n2..n {
            let cost = if j == n2 + i {
                (c.node_indel + c.edge_indel * g1.degree(i) as u64) as f64
            } else {
                FORBIDDEN
            };
            m.set(i, j, cost);
        }
    }
    for i in n1..n {
        for j in 0..n2 {
            let cost = if i == n1 + j {
                (c.node_indel + c.edge_indel * g2.degree(j) as u64) as f64
            } else {
                FORBIDDEN
            };
            m.set(i, j, cost);
        }
    }
    m
}

fn mapping_from_assignment(assign: &[usize], n1: usize, n2: usize) -> NodeMapping {
    let assign = (0..n1)
        .map(|i| {
            let j = assign[i];
            if j < n2 {
                Some(j)
            } else {
                None
            }
        })
        .collect();
    NodeMapping { assign }
}

/// One linear assignment on the padded cost matrix (substitution entries carry
/// a local degree-difference edge estimate), then exact pricing of the induced
/// mapping. Upper bound on the true edit distance.
pub fn hungarian_ged(g1: &LabeledGraph, g2: &LabeledGraph, costs: &CostModel) -> Result<GedResult> {
    let m = padded_cost_matrix(g1, g2, costs);
    let (assign, _) = hungarian_lsap(&m)?;
    let mapping = mapping_from_assignment(&assign, g1.node_count(), g2.node_count());
    let cost = edit_cost(g1, g2, &mapping, costs)?;
    Ok(GedResult { mapping, cost })
}

// ─────────────────────────────────────────────────────────────────────────────
// Quadratic relaxation
// ─────────────────────────────────────────────────────────────────────────────

/// Iteration controls for `ipfp_ged`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpfpParams {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for IpfpParams {
    fn default() -> Self {
        IpfpParams {
            max_iters: 50,
            tol: 1e-9,
        }
    }
}

/// Node-cost matrix of the relaxation: real-to-real cells price relabels,
/// real-to-virtual and virtual-to-real cells price indels, virtual-virtual is
/// free. Unlike the bipartite matrix, deletions are not pinned to a diagonal.
fn relaxation_node_matrix(g1: &LabeledGraph, g2: &LabeledGraph, c: &CostModel) -> Matrix {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    let n = n1 + n2;
    let mut d = Matrix::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n2 {
            d.set(i, j, sub_cost(g1, g2, i, j, c) as f64);
        }
        for j in n2..n {
            d.set(i, j, c.node_indel as f64);
        }
    }
    for i in n1..n {
        for j in 0..n2 {
            d.set(i, j, c.node_indel as f64);
        }
    }
    d
}

/// `A1 * X * A2` where `A1`, `A2` are the (symmetric, zero-padded) adjacency
/// matrices of the two graphs, exploiting their sparsity.
fn adj_sandwich(g1: &LabeledGraph, g2: &LabeledGraph, x: &Matrix) -> Matrix {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    let n = x.rows();
    let mut left = Matrix::zeros(n, n);
    for i in 0..n1 {
        for &u in g1.neighbors(i) {
            for col in 0..n {
                let v = left.at(i, col) + x.at(u, col);
                left.set(i, col, v);
            }
        }
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n2 {
            let mut acc = 0.0;
            for &q in g2.neighbors(j) {
                acc += left.at(i, q);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Relaxed objective `<D, X> + ce*(m1 + m2) - ce * <X, A1 X A2>`. Coincides
/// with `edit_cost` whenever `X` is a permutation matrix.
fn relaxed_objective(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    c: &CostModel,
    d: &Matrix,
    x: &Matrix,
) -> f64 {
    let ce = c.edge_indel as f64;
    let constant = ce * (g1.edge_count() + g2.edge_count()) as f64;
    d.dot(x) + constant - ce * x.dot(&adj_sandwich(g1, g2, x))
}

fn permutation_matrix(assign: &[usize]) -> Matrix {
    let n = assign.len();
    let mut m = Matrix::zeros(n, n);
    for (i, &j) in assign.iter().enumerate() {
        m.set(i, j, 1.0);
    }
    m
}

/// Frank-Wolfe descent on the quadratic relaxation, rounded to a mapping with
/// a final assignment. `init` defaults to the uniform doubly-stochastic
/// matrix; pass a permutation matrix to warm-start. The returned cost is the
/// exact edit cost of the rounded mapping (always an upper bound on GED).
pub fn ipfp_ged(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    costs: &CostModel,
    init: Option<&Matrix>,
    params: IpfpParams,
) -> Result<GedResult> {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    let n = n1 + n2;

    let mut x = match init {
        Some(m) => {
            if m.rows() != n || m.cols() != n {
                return Err(CoreError::Contract("init matrix must be (n1+n2) square"));
            }
            if m.data.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoreError::Contract("init matrix entries must be finite and non-negative"));
            }
            m.clone()
        }
        None => {
            let mut m = Matrix::zeros(n, n);
            if n > 0 {
                m.fill(1.0 / n as f64);
            }
            m
        }
    };

    let d = relaxation_node_matrix(g1, g2, costs);
    let ce = costs.edge_indel as f64;
    let mut current = relaxed_objective(g1, g2, costs, &d, &x);

    for _ in 0..params.max_iters {
        if n == 0 {
            break;
        }
        // Gradient of the relaxed objective at x.
        let sandwich = adj_sandwich(g1, g2, &x);
        let mut grad = d.clone();
        for idx in 0..grad.data.len() {
            grad.data[idx] -= 2.0 * ce * sandwich.data[idx];
        }
        let (assign, _) = hungarian_lsap(&grad)?;
        let y = permutation_matrix(&assign);

        // Exact line search: the objective restricted to x + t(y - x) is the
        // quadratic a*t^2 + b*t + const with the coefficients below.
        let mut delta = y;
        for idx in 0..delta.data.len() {
            delta.data[idx] -= x.data[idx];
        }
        let b = grad.dot(&delta);
        let a = -ce * delta.dot(&adj_sandwich(g1, g2, &delta));
        let t = if a > 0.0 {
            (-b / (2.0 * a)).clamp(0.0, 1.0)
        } else if a + b < 0.0 {
            1.0
        } else {
            0.0
        };
        if t <= 0.0 {
            break;
        }
        for idx in 0..x.data.len() {
            x.data[idx] += t * delta.data[idx];
        }
        let next = a * t * t + b * t + current;
        debug_assert!(next <= current + 1e-9, "line search must never ascend");
        if current - next < params.tol {
            break;
        }
        current = next;
    }

    // Round: maximize <X, P> over permutations, then price exactly.
    let mut neg = x;
    for v in neg.data.iter_mut() {
        *v = -*v;
    }
    let (assign, _) = hungarian_lsap(&neg)?;
    let mapping = mapping_from_assignment(&assign, n1, n2);
    let cost = edit_cost(g1, g2, &mapping, costs)?;
    Ok(GedResult { mapping, cost })
}

// ─────────────────────────────────────────────────────────────────────────────
// Exhaustive oracle
// ─────────────────────────────────────────────────────────────────────────────

/// Exact GED by branch-and-bound over all partial injective mappings.
/// Refuses instances with more than 16 nodes in total.
pub fn brute_force_ged(g1: &LabeledGraph, g2: &LabeledGraph, costs: &CostModel) -> Result<GedResult> {
    let n1 = g1.node_count();
    let n2 = g2.node_count();
    if n1 + n2 > 16 {
        return Err(CoreError::Contract("brute force limited to 16 total nodes"));
    }

    struct Search<'a> {
        g1: &'a LabeledGraph,
        g2: &'a LabeledGraph,
        costs: &'a CostModel,
        assign: Vec<Option<NodeId>>,
        used: Vec<bool>,
        best_cost: u64,
        best: Vec<Option<NodeId>>,
    }

    impl Search<'_> {
        /// Edge cost incurred by deciding node `i`: one indel per earlier
        /// g1-edge whose image is missing; `matched` counts preserved edges.
        fn edge_delta(&self, i: NodeId, j: Option<NodeId>, matched: &mut u64) -> u64 {
            let mut cost = 0;
            for &u in self.g1.neighbors(i) {
                if u >= i {
                    continue;
                }
                let preserved = match (self.assign[u], j) {
                    (Some(p), Some(q)) => self.g2.has_edge(p, q),
                    _ => false,
                };
                if preserved {
                    *matched += 1;
                } else {
                    cost += self.costs.edge_indel;
                }
            }
            cost
        }

        fn rec(&mut self, i: usize, partial: u64, matched: u64, covered: usize) {
            if partial >= self.best_cost {
                return;
            }
            if i == self.g1.node_count() {
                let insertions = self.g2.edge_count() as u64 - matched;
                let node_ins = (self.g2.node_count() - covered) as u64;
                let total = partial
                    + insertions * self.costs.edge_indel
                    + node_ins * self.costs.node_indel;
                if total < self.best_cost {
                    self.best_cost = total;
                    self.best = self.assign.clone();
                }
                return;
            }
            for j in 0..self.g2.node_count() {
                if self.used[j] {
                    continue;
                }
                let mut m = matched;
                let edge = self.edge_delta(i, Some(j), &mut m);
                let node = sub_cost(self.g1, self.g2, i, j, self.costs);
                self.assign[i] = Some(j);
                self.used[j] = true;
                self.rec(i + 1, partial + node + edge, m, covered + 1);
                self.used[j] = false;
                self.assign[i] = None;
            }
            let mut m = matched;
            let edge = self.edge_delta(i, None, &mut m);
            self.rec(i + 1, partial + self.costs.node_indel + edge, m, covered);
        }
    }

    let mut search = Search {
        g1,
        g2,
        costs,
        assign: vec![None; n1],
        used: vec![false; n2],
        best_cost: u64::MAX,
        best: vec![None; n1],
    };
    search.rec(0, 0, 0, 0);
    let mapping = NodeMapping {
        assign: search.best,
    };
    let cost = edit_cost(g1, g2, &mapping, costs)?;
    debug_assert_eq!(cost, search.best_cost);
    Ok(GedResult {
        mapping,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn triangle() -> LabeledGraph {
        let mut g = LabeledGraph::new(vec![0, 0, 0]);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(0, 2).unwrap();
        g
    }

    fn path3() -> LabeledGraph {
        let mut g = LabeledGraph::new(vec![0, 0, 0]);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    fn random_graph(n: usize, labels: u32, edge_prob: f64, seed: u64) -> LabeledGraph {
        let mut rng = crate::rng::stream_rng(seed, 0);
        let labels = (0..n).map(|_| rng.gen_range(0..labels)).collect();
        let mut g = LabeledGraph::new(labels);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(edge_prob) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn edit_cost_prices_the_identity_as_zero() {
        let g = triangle();
        let id = NodeMapping::new(vec![Some(0), Some(1), Some(2)], 3).unwrap();
        assert_eq!(edit_cost(&g, &g, &id, &CostModel::default()).unwrap(), 0);
    }

    #[test]
    fn edit_cost_triangle_vs_path_identity_drops_one_edge() {
        let id = NodeMapping::new(vec![Some(0), Some(1), Some(2)], 3).unwrap();
        assert_eq!(
            edit_cost(&triangle(), &path3(), &id, &CostModel::default()).unwrap(),
            1
        );
    }

    #[test]
    fn edit_cost_triangle_vs_nothing() {
        let empty = LabeledGraph::new(Vec::new());
        let all_deleted = NodeMapping::new(vec![None, None, None], 0).unwrap();
        assert_eq!(
            edit_cost(&triangle(), &empty, &all_deleted, &CostModel::default()).unwrap(),
            6
        );
    }

    #[test]
    fn edit_cost_rejects_non_injective_mappings() {
        let bad = NodeMapping {
            assign: vec![Some(0), Some(0), None],
        };
        assert_eq!(
            edit_cost(&triangle(), &path3(), &bad, &CostModel::default()),
            Err(CoreError::Contract("mapping must be injective"))
        );
        assert!(NodeMapping::new(vec![Some(0), Some(0)], 3).is_err());
        assert!(NodeMapping::new(vec![Some(5)], 3).is_err());
    }

    #[test]
    fn lsap_matches_permutation_enumeration() {
        let entries = [
            [7.0, 3.0, 6.0, 9.0, 5.0, 2.0],
            [4.0, 8.0, 1.0, 6.0, 3.0, 7.0],
            [9.0, 2.0, 5.0, 4.0, 8.0, 1.0],
            [3.0, 6.0, 2.0, 8.0, 1.0, 5.0],
            [5.0, 1.0, 9.0, 3.0, 7.0, 4.0],
            [2.0, 7.0, 4.0, 1.0, 6.0, 9.0],
        ];
        let mut m = Matrix::zeros(6, 6);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        // Oracle: all 720 permutations.
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            fn rec(pool: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if pool.is_empty() {
                    out.push(prefix.clone());
                    return;
                }
                for i in 0..pool.len() {
                    let v = pool.remove(i);
                    prefix.push(v);
                    rec(pool, prefix, out);
                    prefix.pop();
                    pool.insert(i, v);
                }
            }
            let mut out = Vec::new();
            rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
            out
        }
        let mut best = f64::INFINITY;
        for p in permutations(6) {
            let total: f64 = p.iter().enumerate().map(|(i, &j)| entries[i][j]).sum();
            best = best.min(total);
        }
        let (assign, total) = hungarian_lsap(&m).unwrap();
        assert_eq!(total, best);
        let recomputed: f64 = assign.iter().enumerate().map(|(i, &j)| entries[i][j]).sum();
        assert_eq!(total, recomputed);
        let mut sorted = assign.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn lsap_tie_break_is_first_column() {
        let m = Matrix::zeros(3, 3);
        let (assign, total) = hungarian_lsap(&m).unwrap();
        assert_eq!(assign, vec![0, 1, 2]);
        assert_eq!(total, 0.0);
    }

    #[test]
    fn lsap_rejects_bad_matrices() {
        let mut m = Matrix::zeros(2, 3);
        assert!(hungarian_lsap(&m).is_err());
        m = Matrix::zeros(2, 2);
        m.set(0, 0, f64::NAN);
        assert!(hungarian_lsap(&m).is_err());
        m.set(0, 0, f64::INFINITY);
        assert!(hungarian_lsap(&m).is_err());
    }

    #[test]
    fn brute_force_triangle_vs_path_is_one() {
        let r = brute_force_ged(&triangle(), &path3(), &CostModel::default()).unwrap();
        assert_eq!(r.cost, 1);
        assert_eq!(
            edit_cost(&triangle(), &path3(), &r.mapping, &CostModel::default()).unwrap(),
            1
        );
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let g = random_graph(9, 3, 0.3, 5);
        assert!(brute_force_ged(&g, &g, &CostModel::default()).is_err());
    }

    #[test]
    fn hungarian_and_ipfp_upper_bound_the_oracle() {
        let c = CostModel::default();
        for seed in 0..20 {
            let g1 = random_graph(6, 3, 0.35, seed);
            let g2 = random_graph(6, 3, 0.35, seed + 1000);
            let exact = brute_force_ged(&g1, &g2, &c).unwrap();
            let hung = hungarian_ged(&g1, &g2, &c).unwrap();
            let ipfp = ipfp_ged(&g1, &g2, &c, None, IpfpParams::default()).unwrap();
            assert!(hung.cost >= exact.cost, "seed {seed}");
            assert!(ipfp.cost >= exact.cost, "seed {seed}");
            assert_eq!(edit_cost(&g1, &g2, &hung.mapping, &c).unwrap(), hung.cost);
            assert_eq!(edit_cost(&g1, &g2, &ipfp.mapping, &c).unwrap(), ipfp.cost);
        }
    }

    #[test]
    fn ipfp_beats_hungarian_on_average() {
        let c = CostModel::default();
        let mut hung_total = 0u64;
        let mut ipfp_total = 0u64;
        for seed in 0..50 {
            let g1 = random_graph(10, 4, 0.25, 10_000 + seed);
            let g2 = random_graph(10, 4, 0.25, 20_000 + seed);
            hung_total += hungarian_ged(&g1, &g2, &c).unwrap().cost;
            ipfp_total += ipfp_ged(&g1, &g2, &c, None, IpfpParams::default()).unwrap().cost;
        }
        assert!(
            ipfp_total <= hung_total,
            "ipfp mean {} vs hungarian mean {}",
            ipfp_total as f64 / 50.0,
            hung_total as f64 / 50.0
        );
    }

    #[test]
    fn ipfp_identity_init_on_identical_graphs_is_free() {
        let g = random_graph(8, 3, 0.4, 77);
        let n = g.node_count() * 2;
        // Identity on the real block, matching pads on the virtual block.
        let mut id = Matrix::zeros(n, n);
        for i in 0..g.node_count() {
            id.set(i, i, 1.0);
            id.set(i + g.node_count(), i + g.node_count(), 1.0);
        }
        let r = ipfp_ged(&g, &g, &CostModel::default(), Some(&id), IpfpParams::default()).unwrap();
        assert_eq!(r.cost, 0);
    }

    #[test]
    fn ipfp_triangle_vs_path_not_worse_than_hungarian() {
        let c = CostModel::default();
        let hung = hungarian_ged(&triangle(), &path3(), &c).unwrap();
        let ipfp = ipfp_ged(&triangle(), &path3(), &c, None, IpfpParams::default()).unwrap();
        assert_eq!(ipfp.cost, 1);
        assert!(ipfp.cost <= hung.cost);
    }

    #[test]
    fn toggled_copies_stay_within_toggle_count() {
        let c = CostModel::default();
        for seed in 0..10u64 {
            let g1 = random_graph(7, 3, 0.3, 500 + seed);
            let mut rng = crate::rng::stream_rng(900 + seed, 1);
            let mut g2 = g1.clone();
            let toggles = 3;
            for _ in 0..toggles {
                let u = rng.gen_range(0..g2.node_count());
                let v = rng.gen_range(0..g2.node_count());
                if u != v {
                    g2 = g2.with_toggled_edge(u, v).unwrap();
                }
            }
            let exact = brute_force_ged(&g1, &g2, &c).unwrap();
            assert!(exact.cost <= toggles, "seed {seed}: {} > {toggles}", exact.cost);
        }
    }
}
