//! Resource-constrained list scheduling.
//!
//! A schedule is produced by an event-driven simulator: at time zero and at
//! every job completion, ready jobs are scanned in priority order and every
//! one that fits the remaining capacity is started (jobs that do not fit are
//! skipped, not blocking the ones behind them). Priorities come from a
//! heuristic; the simulator itself is heuristic-agnostic.
//!
//! The precedence graph is passed separately from the instance so the same
//! durations and resources can be scheduled under a modified precedence
//! relation, which is exactly what the bi-level environment does.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{CoreError, Result};
use crate::graph::{DagInstance, NodeId, WeightedDigraph};

/// Total order over nodes, highest priority first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    order: Vec<NodeId>,
}

impl PriorityOrder {
    /// Wraps a permutation of `0..order.len()`.
    pub fn new(order: Vec<NodeId>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(CoreError::Contract("priority order must be a permutation"));
            }
            seen[v] = true;
        }
        Ok(PriorityOrder { order })
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

    /// Position of each node in the order (0 = scheduled first).
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            rank[v] = i;
        }
        rank
    }
}

/// Start time per node (microseconds) plus the resulting makespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub start_us: Vec<u64>,
    pub makespan_us: u64,
}

impl Schedule {
    /// Nodes ordered by start time, ties by ascending id. Replaying this
    /// order through the simulator under a different precedence graph is how
    /// a schedule found on a modified instance gets scored on the original.
    pub fn start_order(&self) -> PriorityOrder {
        let mut order: Vec<NodeId> = (0..self.start_us.len()).collect();
        order.sort_by_key(|&v| (self.start_us[v], v));
        PriorityOrder { order }
    }
}

/// Runs the list-scheduling simulator.
///
/// `precedence` must have the same node count as `inst` and be acyclic; the
/// durations, resources, and capacity always come from `inst`.
pub fn simulate_list_schedule(
    inst: &DagInstance,
    priority: &PriorityOrder,
    precedence: &WeightedDigraph,
) -> Result<Schedule> {
    let n = inst.node_count();
    if priority.len() != n || precedence.node_count() != n {
        return Err(CoreError::Contract("priority order and precedence must cover all nodes"));
    }
    let rank = priority.ranks();
    let mut indeg: Vec<usize> = (0..n).map(|v| precedence.in_degree(v)).collect();
    let mut ready: BTreeSet<(usize, NodeId)> = (0..n)
        .filter(|&v| indeg[v] == 0)
        .map(|v| (rank[v], v))
        .collect();
    let mut running: BinaryHeap<Reverse<(u64, NodeId)>> = BinaryHeap::new();
    let mut start = vec![0u64; n];
    let mut avail = inst.capacity;
    let mut now = 0u64;
    let mut makespan = 0u64;
    let mut finished = 0usize;

    loop {
        let mut to_start = Vec::new();
        for &(r, v) in ready.iter() {
            if inst.resource[v] <= avail {
                avail -= inst.resource[v];
                to_start.push((r, v));
            }
        }
        for &(r, v) in &to_start {
            ready.remove(&(r, v));
            start[v] = now;
            running.push(Reverse((now + inst.duration_us[v], v)));
        }
        let Some(&Reverse((t, _))) = running.peek() else {
            break;
        };
        now = t;
        while let Some(&Reverse((tt, v))) = running.peek() {
            if tt != t {
                break;
            }
            running.pop();
            finished += 1;
            avail += inst.resource[v];
            makespan = makespan.max(tt);
            for &(w, _) in precedence.successors(v) {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert((rank[w], w));
                }
            }
        }
    }

    if finished != n {
        return Err(CoreError::Contract("precedence contains a cycle"));
    }
    Ok(Schedule {
        start_us: start,
        makespan_us: makespan,
    })
}

/// Longest start-to-sink duration sum through each node, the classic
/// bottom-level rank: `bl(v) = dur(v) + max bl(successors)`, 0-successor
/// nodes bottom out at their own duration.
pub fn bottom_levels(inst: &DagInstance, precedence: &WeightedDigraph) -> Result<Vec<u64>> {
    let n = inst.node_count();
    if precedence.node_count() != n {
        return Err(CoreError::Contract("precedence must cover all nodes"));
    }
    let order = precedence.topological_order()?;
    let mut bl = vec![0u64; n];
    for &v in order.iter().rev() {
        let best = precedence
            .successors(v)
            .iter()
            .map(|&(w, _)| bl[w])
            .max()
            .unwrap_or(0);
        bl[v] = inst.duration_us[v] + best;
    }
    Ok(bl)
}

/// Critical-path priorities: descending bottom level, ties by ascending id.
pub fn critical_path_priorities(
    inst: &DagInstance,
    precedence: &WeightedDigraph,
) -> Result<PriorityOrder> {
    let bl = bottom_levels(inst, precedence)?;
    let mut order: Vec<NodeId> = (0..inst.node_count()).collect();
    order.sort_by_key(|&v| (Reverse(bl[v]), v));
    Ok(PriorityOrder { order })
}

/// Shortest-job-first priorities: ascending duration, ties by ascending id.
/// Independent of the precedence graph.
pub fn sjf_priorities(inst: &DagInstance) -> PriorityOrder {
    let mut order: Vec<NodeId> = (0..inst.node_count()).collect();
    order.sort_by_key(|&v| (inst.duration_us[v], v));
    PriorityOrder { order }
}

/// Priority heuristics available to the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DagHeuristic {
    CriticalPath,
    Sjf,
}

/// Computes priorities under `precedence` with the chosen heuristic and
/// simulates. Returns the schedule; its `makespan_us` is the objective.
pub fn solve_dag(
    inst: &DagInstance,
    precedence: &WeightedDigraph,
    heuristic: DagHeuristic,
) -> Result<Schedule> {
    let priority = match heuristic {
        DagHeuristic::CriticalPath => critical_path_priorities(inst, precedence)?,
        DagHeuristic::Sjf => sjf_priorities(inst),
    };
    simulate_list_schedule(inst, &priority, precedence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn independent(durations: &[u64], resources: &[u64], capacity: u64) -> DagInstance {
        DagInstance::new(
            WeightedDigraph::new(durations.len()),
            durations.to_vec(),
            resources.to_vec(),
            capacity,
        )
        .unwrap()
    }

    /// Exhaustive oracle for tiny instances: every job starts at 0 or at some
    /// completion time of jobs started before it; search all assignments that
    /// respect precedence and capacity and return the minimum makespan.
    fn brute_force_makespan(inst: &DagInstance) -> u64 {
        fn usage_ok(inst: &DagInstance, starts: &[Option<u64>]) -> bool {
            let points: Vec<u64> = starts.iter().flatten().copied().collect();
            for &t in &points {
                let used: u64 = starts
                    .iter()
                    .enumerate()
                    .filter_map(|(v, s)| {
                        s.filter(|&sv| sv <= t && t < sv + inst.duration_us[v])
                            .map(|_| inst.resource[v])
                    })
                    .sum();
                if used > inst.capacity {
                    return false;
                }
            }
            true
        }
        fn rec(inst: &DagInstance, starts: &mut Vec<Option<u64>>, best: &mut u64) {
            let n = inst.node_count();
            if let Some(v) = (0..n).find(|&v| starts[v].is_none()) {
                let mut candidates: Vec<u64> = vec![0];
                for (w, s) in starts.iter().enumerate() {
                    if let Some(s) = s {
                        candidates.push(s + inst.duration_us[w]);
                    }
                }
                candidates.sort_unstable();
                candidates.dedup();
                for t in candidates {
                    let preds_ok = inst
                        .graph
                        .predecessors(v)
                        .iter()
                        .all(|&p| starts[p].is_some_and(|sp| sp + inst.duration_us[p] <= t));
                    if !preds_ok {
                        continue;
                    }
                    starts[v] = Some(t);
                    if usage_ok(inst, starts) {
                        rec(inst, starts, best);
                    }
                    starts[v] = None;
                }
            } else {
                let makespan = starts
                    .iter()
                    .enumerate()
                    .map(|(v, s)| s.unwrap() + inst.duration_us[v])
                    .max()
                    .unwrap_or(0);
                *best = (*best).min(makespan);
            }
        }
        let mut starts = vec![None; inst.node_count()];
        let mut best = u64::MAX;
        rec(inst, &mut starts, &mut best);
        best
    }

    #[test]
    fn two_heavy_jobs_cannot_overlap() {
        let inst = independent(&[4, 4], &[6, 6], 10);
        let sched = solve_dag(&inst, &inst.graph, DagHeuristic::CriticalPath).unwrap();
        assert_eq!(sched.makespan_us, 8);
        assert_eq!(brute_force_makespan(&inst), 8);
    }

    #[test]
    fn three_jobs_at_forty_percent_capacity_leave_one_behind() {
        let inst = independent(&[4, 4, 4], &[4, 4, 4], 10);
        let sched = solve_dag(&inst, &inst.graph, DagHeuristic::Sjf).unwrap();
        assert_eq!(brute_force_makespan(&inst), 8);
        assert_eq!(sched.makespan_us, 8);
        let mut starts = sched.start_us.clone();
        starts.sort_unstable();
        assert_eq!(starts, vec![0, 0, 4]);
    }

    #[test]
    fn three_jobs_at_thirty_percent_capacity_all_fit() {
        let inst = independent(&[4, 4, 4], &[3, 3, 3], 10);
        let sched = solve_dag(&inst, &inst.graph, DagHeuristic::CriticalPath).unwrap();
        assert_eq!(brute_force_makespan(&inst), 4);
        assert_eq!(sched.makespan_us, 4);
    }

    #[test]
    fn diamond_bottom_levels() {
        let mut g = WeightedDigraph::new(4);
        for &(u, v) in &[(0, 1), (0, 2), (1, 3), (2, 3)] {
            g.add_edge(u, v, 0).unwrap();
        }
        let inst = DagInstance::new(g, vec![1, 5, 2, 1], vec![1, 1, 1, 1], 10).unwrap();

        // Oracle: maximum duration sum over all paths leaving each node.
        fn longest_from(inst: &DagInstance, v: NodeId) -> u64 {
            let tail = inst
                .graph
                .successors(v)
                .iter()
                .map(|&(w, _)| longest_from(inst, w))
                .max()
                .unwrap_or(0);
            inst.duration_us[v] + tail
        }
        let expect: Vec<u64> = (0..4).map(|v| longest_from(&inst, v)).collect();
        assert_eq!(expect, vec![7, 6, 3, 1]);

        assert_eq!(bottom_levels(&inst, &inst.graph).unwrap(), expect);
        let prio = critical_path_priorities(&inst, &inst.graph).unwrap();
        assert_eq!(prio.order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn sjf_breaks_duration_ties_by_id() {
        let inst = independent(&[5, 2, 2, 1], &[1, 1, 1, 1], 10);
        assert_eq!(sjf_priorities(&inst).order(), &[3, 1, 2, 0]);
    }

    #[test]
    fn chain_is_fully_sequential() {
        let mut g = WeightedDigraph::new(3);
        g.add_edge(0, 1, 0).unwrap();
        g.add_edge(1, 2, 0).unwrap();
        let inst = DagInstance::new(g, vec![3, 4, 5], vec![1, 1, 1], 10).unwrap();
        let sched = solve_dag(&inst, &inst.graph, DagHeuristic::CriticalPath).unwrap();
        assert_eq!(sched.makespan_us, 12);
        assert_eq!(sched.start_us, vec![0, 3, 7]);
        assert_eq!(brute_force_makespan(&inst), 12);
    }

    #[test]
    fn backfill_skips_oversized_ready_job() {
        // Priority order puts the big job first, but it cannot fit next to the
        // running one; the small jobs behind it must not be blocked.
        let inst = independent(&[10, 4, 4], &[6, 6, 4], 10);
        let prio = PriorityOrder::new(vec![0, 1, 2]).unwrap();
        let sched = simulate_list_schedule(&inst, &prio, &inst.graph).unwrap();
        assert_eq!(sched.start_us[0], 0);
        assert_eq!(sched.start_us[2], 0, "small job should backfill at t=0");
        assert_eq!(sched.start_us[1], 10);
    }

    #[test]
    fn start_order_sorts_by_time_then_id() {
        let sched = Schedule {
            start_us: vec![5, 0, 5, 2],
            makespan_us: 9,
        };
        assert_eq!(sched.start_order().order(), &[1, 3, 0, 2]);
    }

    #[test]
    fn simulate_rejects_bad_inputs() {
        let inst = independent(&[1, 1], &[1, 1], 1);
        assert!(PriorityOrder::new(vec![0, 0]).is_err());
        assert!(PriorityOrder::new(vec![1, 2]).is_err());
        let prio = PriorityOrder::new(vec![0]).unwrap();
        assert!(simulate_list_schedule(&inst, &prio, &inst.graph).is_err());
        let mut cyclic = WeightedDigraph::new(2);
        cyclic.add_edge(0, 1, 0).unwrap();
        cyclic.add_edge(1, 0, 0).unwrap();
        let prio = PriorityOrder::new(vec![0, 1]).unwrap();
        assert_eq!(
            simulate_list_schedule(&inst, &prio, &cyclic),
            Err(CoreError::Contract("precedence contains a cycle"))
        );
    }
}
