//! Hamiltonian cycle search phrased as symmetric TSP with binary weights.
//!
//! `hcp_to_tsp` maps a graph to a complete weight matrix: existing edges cost
//! 0, missing edges cost 1. A tour of length 0 therefore is a Hamiltonian
//! cycle, and tour length counts how many non-edges a tour is forced to use.
//!
//! Three tour constructors are provided: nearest neighbor and farthest
//! insertion as cheap deterministic baselines, and `lk_search`, a randomized
//! multi-restart local search combining 2-opt and Or-opt moves with don't-look
//! bits and first-improvement acceptance. Integer weights keep every length
//! and every move gain exact.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::graph::{HcpInstance, NodeId};
use crate::rng::stream_rng;

/// Dense symmetric weight matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspMatrix {
    n: usize,
    w: Vec<u64>,
}

impl TspMatrix {
    /// All off-diagonal weights set to `fill`.
    pub fn uniform(n: usize, fill: u64) -> Self {
        let mut m = TspMatrix { n, w: vec![fill; n * n] };
        for i in 0..n {
            m.w[i * n + i] = 0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> u64 {
        self.w[u * self.n + v]
    }

    /// Sets `w(u, v)` and `w(v, u)`.
    pub fn set_weight(&mut self, u: NodeId, v: NodeId, weight: u64) -> Result<()> {
        self.check_pair(u, v)?;
        self.w[u * self.n + v] = weight;
        self.w[v * self.n + u] = weight;
        Ok(())
    }

    /// Copy with `delta` added to the symmetric pair `w(u, v)`. Penalties
    /// compound: applying the same pair twice adds twice.
    pub fn with_added_weight(&self, u: NodeId, v: NodeId, delta: u64) -> Result<Self> {
        self.check_pair(u, v)?;
        let mut m = self.clone();
        m.w[u * self.n + v] += delta;
        m.w[v * self.n + u] += delta;
        Ok(m)
    }

    fn check_pair(&self, u: NodeId, v: NodeId) -> Result<()> {
        if u >= self.n {
            return Err(CoreError::NodeOutOfRange { node: u, node_count: self.n });
        }
        if v >= self.n {
            return Err(CoreError::NodeOutOfRange { node: v, node_count: self.n });
        }
        if u == v {
            return Err(CoreError::Contract("diagonal weights are fixed at zero"));
        }
        Ok(())
    }
}

/// Binary-weight matrix of an instance: 0 on edges, 1 on non-edges.
pub fn hcp_to_tsp(h: &HcpInstance) -> TspMatrix {
    let n = h.node_count();
    let mut m = TspMatrix::uniform(n, 1);
    for (u, v) in h.edges() {
        m.set_weight(u, v, 0).expect("instance edges are valid pairs");
    }
    m
}

/// Closed tour as a node sequence; the edge back to the start is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    order: Vec<NodeId>,
}

impl Tour {
    /// Wraps a permutation of `0..order.len()`.
    pub fn new(order: Vec<NodeId>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(CoreError::Contract("tour must be a permutation"));
            }
            seen[v] = true;
        }
        Ok(Tour { order })
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The two tour neighbors of `node`, ascending.
    pub fn neighbors_of(&self, node: NodeId) -> Result<(NodeId, NodeId)> {
        let n = self.order.len();
        if n < 3 {
            return Err(CoreError::Contract("tour too short for neighbors"));
        }
        let pos = self
            .order
            .iter()
            .position(|&v| v == node)
            .ok_or(CoreError::NodeOutOfRange { node, node_count: n })?;
        let a = self.order[(pos + n - 1) % n];
        let b = self.order[(pos + 1) % n];
        Ok((a.min(b), a.max(b)))
    }
}

/// Sum of tour edge weights, including the closing edge.
pub fn tour_length(m: &TspMatrix, tour: &Tour) -> Result<u64> {
    let n = tour.len();
    if n != m.n() {
        return Err(CoreError::Contract("tour must cover every matrix node"));
    }
    let mut total = 0;
    for i in 0..n {
        total += m.weight(tour.order[i], tour.order[(i + 1) % n]);
    }
    Ok(total)
}

/// True when the tour is a valid Hamiltonian cycle of `h`: a permutation whose
/// consecutive pairs (closing edge included) are all edges of the graph.
pub fn is_hamiltonian_cycle(h: &HcpInstance, tour: &Tour) -> bool {
    let n = h.node_count();
    if tour.len() != n {
        return false;
    }
    (0..n).all(|i| h.has_edge(tour.order[i], tour.order[(i + 1) % n]))
}

/// Greedy construction: from `start`, repeatedly move to the cheapest
/// unvisited node, ties by ascending id.
pub fn nearest_neighbor(m: &TspMatrix, start: NodeId) -> Result<Tour> {
    let n = m.n();
    if n < 3 {
        return Err(CoreError::Contract("tour construction needs at least 3 nodes"));
    }
    if start >= n {
        return Err(CoreError::NodeOutOfRange { node: start, node_count: n });
    }
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut current = start;
    visited[start] = true;
    order.push(start);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (m.weight(current, v), v))
            .expect("unvisited nodes remain");
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Ok(Tour { order })
}

/// Farthest insertion: seed with the heaviest pair, then repeatedly take the
/// unvisited node farthest from the tour and splice it in at the cheapest
/// position. All ties by ascending index, positions by earliest.
pub fn farthest_insertion(m: &TspMatrix) -> Result<Tour> {
    let n = m.n();
    if n < 3 {
        return Err(CoreError::Contract("tour construction needs at least 3 nodes"));
    }
    let mut seed = (0, 1);
    let mut seed_w = m.weight(0, 1);
    for u in 0..n {
        for v in u + 1..n {
            if m.weight(u, v) > seed_w {
                seed_w = m.weight(u, v);
                seed = (u, v);
            }
        }
    }
    let mut order = vec![seed.0, seed.1];
    let mut in_tour = vec![false; n];
    in_tour[seed.0] = true;
    in_tour[seed.1] = true;
    // Distance from each node to the nearest tour node, kept incrementally.
    let mut dist: Vec<u64> = (0..n)
        .map(|v| m.weight(v, seed.0).min(m.weight(v, seed.1)))
        .collect();

    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !in_tour[v])
            .max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a)))
            .expect("unvisited nodes remain");
        let mut best_pos = 0;
        let mut best_delta = i64::MAX;
        for i in 0..order.len() {
            let p = order[i];
            let q = order[(i + 1) % order.len()];
            let delta = m.weight(p, next) as i64 + m.weight(next, q) as i64
                - m.weight(p, q) as i64;
            if delta < best_delta {
                best_delta = delta;
                best_pos = i + 1;
            }
        }
        order.insert(best_pos % (order.len() + 1), next);
        in_tour[next] = true;
        for v in 0..n {
            if !in_tour[v] {
                dist[v] = dist[v].min(m.weight(v, next));
            }
        }
    }
    Ok(Tour { order })
}

// ─────────────────────────────────────────────────────────────────────────────
// Local search
// ─────────────────────────────────────────────────────────────────────────────

struct LocalSearch<'a> {
    m: &'a TspMatrix,
    order: Vec<NodeId>,
    pos: Vec<usize>,
    len: u64,
}

impl<'a> LocalSearch<'a> {
    fn new(m: &'a TspMatrix, order: Vec<NodeId>) -> Self {
        let n = order.len();
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let tour = Tour { order: order.clone() };
        let len = tour_length(m, &tour).expect("order is a permutation");
        LocalSearch { m, order, pos, len }
    }

    fn w(&self, a: NodeId, b: NodeId) -> i64 {
        self.m.weight(a, b) as i64
    }

    fn at(&self, i: usize) -> NodeId {
        self.order[i]
    }

    fn succ_idx(&self, i: usize) -> usize {
        (i + 1) % self.order.len()
    }

    /// 2-opt: replace edges (t[i], t[i+1]) and (t[j], t[j+1]) with
    /// (t[i], t[j]) and (t[i+1], t[j+1]); positive gain means shorter.
    fn two_opt_gain(&self, i: usize, j: usize) -> i64 {
        let (a, an) = (self.at(i), self.at(self.succ_idx(i)));
        let (c, cn) = (self.at(j), self.at(self.succ_idx(j)));
        self.w(a, an) + self.w(c, cn) - self.w(a, c) - self.w(an, cn)
    }

    fn apply_two_opt(&mut self, i: usize, j: usize, gain: i64) {
        let (lo, hi) = (i.min(j), i.max(j));
        self.order[lo + 1..=hi].reverse();
        for k in lo + 1..=hi {
            self.pos[self.order[k]] = k;
        }
        self.len = (self.len as i64 - gain) as u64;
        debug_assert_eq!(
            self.len,
            tour_length(self.m, &Tour { order: self.order.clone() }).unwrap(),
            "incremental length drifted from recomputation"
        );
    }

    /// Relocates the segment `order[p..=q]` (never wrapping) to sit after
    /// position `c`, optionally reversed. Positive gain means shorter.
    fn or_opt_gain(&self, p: usize, q: usize, c: usize, rev: bool) -> i64 {
        let n = self.order.len();
        let before = self.at((p + n - 1) % n);
        let after = self.at((q + 1) % n);
        let (first, last) = if rev {
            (self.at(q), self.at(p))
        } else {
            (self.at(p), self.at(q))
        };
        let (x, y) = (self.at(c), self.at(self.succ_idx(c)));
        self.w(before, self.at(p)) + self.w(self.at(q), after) + self.w(x, y)
            - self.w(before, after)
            - self.w(x, first)
            - self.w(last, y)
    }

    fn apply_or_opt(&mut self, p: usize, q: usize, c: usize, rev: bool, gain: i64) {
        let n = self.order.len();
        let mut segment: Vec<NodeId> = self.order[p..=q].to_vec();
        if rev {
            segment.reverse();
        }
        let mut rest: Vec<NodeId> = Vec::with_capacity(n - segment.len());
        let mut k = (q + 1) % n;
        while k != p {
            rest.push(self.order[k]);
            k = (k + 1) % n;
        }
        // `rest` starts right after the removed segment; insertion happens
        // after node `anchor` within it.
        let anchor = self.order[c];
        let at = rest.iter().position(|&v| v == anchor).expect("anchor not in segment") + 1;
        let mut next: Vec<NodeId> = Vec::with_capacity(n);
        next.extend_from_slice(&rest[..at]);
        next.extend_from_slice(&segment);
        next.extend_from_slice(&rest[at..]);
        self.order = next;
        for (i, &v) in self.order.iter().enumerate() {
            self.pos[v] = i;
        }
        self.len = (self.len as i64 - gain) as u64;
        debug_assert_eq!(
            self.len,
            tour_length(self.m, &Tour { order: self.order.clone() }).unwrap(),
            "incremental length drifted from recomputation"
        );
    }

    /// First improving move touching node `a`, applied immediately.
    /// Returns the nodes whose neighborhoods changed.
    fn improve_once(&mut self, a: NodeId) -> Option<Vec<NodeId>> {
        let n = self.order.len();
        let pa = self.pos[a];
        let pa_prev = (pa + n - 1) % n;
        for &i in &[pa, pa_prev] {
            for j in 0..n {
                if j == i || j == self.succ_idx(i) || self.succ_idx(j) == i {
                    continue;
                }
                let gain = self.two_opt_gain(i, j);
                if gain > 0 {
                    let touched = vec![
                        self.at(i),
                        self.at(self.succ_idx(i)),
                        self.at(j),
                        self.at(self.succ_idx(j)),
                    ];
                    self.apply_two_opt(i, j, gain);
                    return Some(touched);
                }
            }
        }
        for seg_len in 1..=3usize {
            if n < seg_len + 2 {
                break;
            }
            let p = self.pos[a];
            let q = p + seg_len - 1;
            if q >= n {
                continue;
            }
            for c in 0..n {
                // Skip anchors inside or immediately before the segment.
                if (p == 0 && c == n - 1) || (c + 1 >= p && c <= q) {
                    continue;
                }
                for rev in [false, true] {
                    if rev && seg_len == 1 {
                        continue;
                    }
                    let gain = self.or_opt_gain(p, q, c, rev);
                    if gain > 0 {
                        let touched = vec![
                            self.at((p + n - 1) % n),
                            self.at(p),
                            self.at(q),
                            self.at((q + 1) % n),
                            self.at(c),
                            self.at(self.succ_idx(c)),
                        ];
                        self.apply_or_opt(p, q, c, rev, gain);
                        return Some(touched);
                    }
                }
            }
        }
        None
    }

    /// Runs to a local optimum with don't-look bits.
    fn descend(&mut self) {
        let n = self.order.len();
        let mut active = vec![true; n];
        let mut remaining = n;
        while remaining > 0 && self.len > 0 {
            for a in 0..n {
                if !active[a] {
                    continue;
                }
                match self.improve_once(a) {
                    Some(touched) => {
                        for t in touched {
                            if !active[t] {
                                active[t] = true;
                                remaining += 1;
                            }
                        }
                    }
                    None => {
                        active[a] = false;
                        remaining -= 1;
                    }
                }
                if self.len == 0 {
                    break;
                }
            }
        }
    }
}

/// Multi-restart local search. Each restart builds a randomized greedy tour
/// (cheapest unvisited next node, ties picked uniformly) and descends with
/// 2-opt and Or-opt moves. Restart `r` draws from a stream derived from
/// `(seed, r)`, so results do not depend on evaluation order; the best tour
/// wins, ties going to the lowest restart index. Stops early on a tour of
/// length 0, which is globally optimal for non-negative weights.
pub fn lk_search(m: &TspMatrix, restarts: usize, seed: u64) -> Result<Tour> {
    let n = m.n();
    if n < 3 {
        return Err(CoreError::Contract("tour construction needs at least 3 nodes"));
    }
    if restarts == 0 {
        return Err(CoreError::Contract("at least one restart required"));
    }
    let mut best: Option<(u64, Vec<NodeId>)> = None;
    for r in 0..restarts {
        let mut rng = stream_rng(seed, r as u64);
        let start = rng.gen_range(0..n);
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        let mut current = start;
        visited[start] = true;
        order.push(start);
        for _ in 1..n {
            let cheapest = (0..n)
                .filter(|&v| !visited[v])
                .map(|v| m.weight(current, v))
                .min()
                .expect("unvisited nodes remain");
            let ties: Vec<NodeId> = (0..n)
                .filter(|&v| !visited[v] && m.weight(current, v) == cheapest)
                .collect();
            let next = ties[rng.gen_range(0..ties.len())];
            visited[next] = true;
            order.push(next);
            current = next;
        }
        let mut search = LocalSearch::new(m, order);
        search.descend();
        let better = match &best {
            Some((len, _)) => search.len < *len,
            None => true,
        };
        if better {
            let done = search.len == 0;
            best = Some((search.len, search.order));
            if done {
                break;
            }
        }
    }
    let (_, order) = best.expect("at least one restart ran");
    Ok(Tour { order })
}
