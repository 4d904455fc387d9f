//! Randomized invariant checks over the core data structures and the
//! environment, with feasibility and pricing verified by independent
//! re-implementations rather than the code under test.

use bihyb_core::dag::{self, DagHeuristic};
use bihyb_core::env::{self, EnvConfig, Instance, LowerHeuristic, Policy};
use bihyb_core::ged::{self, CostModel, IpfpParams};
use bihyb_core::graph::{DagInstance, HcpInstance, LabeledGraph, WeightedDigraph};
use bihyb_core::hcp::{self, Tour};
use bihyb_core::policy::RandomPolicy;
use proptest::prelude::*;

fn digraph_strategy(max_nodes: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_nodes)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(any::<bool>(), pairs))
        })
        .prop_map(|(n, mask)| {
            // Edges only from lower to higher ids, so the graph is a DAG.
            let mut g = WeightedDigraph::new(n);
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[idx] {
                        g.add_edge(u, v, 0).unwrap();
                    }
                    idx += 1;
                }
            }
            g
        })
}

fn dag_instance_strategy() -> impl Strategy<Value = DagInstance> {
    digraph_strategy(9).prop_flat_map(|g| {
        let n = g.node_count();
        (
            Just(g),
            proptest::collection::vec(1u64..2_000_000, n),
            proptest::collection::vec(1u64..=6, n),
        )
            .prop_map(|(g, dur, res)| DagInstance::new(g, dur, res, 6).unwrap())
    })
}

fn labeled_graph_strategy(max_nodes: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_nodes)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                proptest::collection::vec(0u32..4, n),
                proptest::collection::vec(any::<bool>(), pairs),
            )
        })
        .prop_map(|(labels, mask)| {
            let n = labels.len();
            let mut g = LabeledGraph::new(labels);
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[idx] {
                        g.add_edge(u, v).unwrap();
                    }
                    idx += 1;
                }
            }
            g
        })
}

fn hcp_strategy(max_nodes: usize) -> impl Strategy<Value = HcpInstance> {
    (3..=max_nodes)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(any::<bool>(), pairs))
        })
        .prop_map(|(n, mask)| {
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[idx] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            HcpInstance::new(n, &edges).unwrap()
        })
}

/// Precedence and capacity checked directly from start times, with no help
/// from the simulator.
fn assert_schedule_feasible(inst: &DagInstance, start: &[u64], makespan: u64) {
    let n = inst.node_count();
    assert_eq!(start.len(), n);
    for (u, v, _) in inst.graph.edges() {
        assert!(
            start[v] >= start[u] + inst.duration_us[u],
            "node {v} starts before predecessor {u} finishes"
        );
    }
    let peak = (0..n).map(|v| start[v] + inst.duration_us[v]).max().unwrap_or(0);
    assert_eq!(peak, makespan, "makespan must equal the last finish time");
    // Resource usage can only change at start instants.
    for v in 0..n {
        let t = start[v];
        let used: u64 = (0..n)
            .filter(|&j| start[j] <= t && t < start[j] + inst.duration_us[j])
            .map(|j| inst.resource[j])
            .sum();
        assert!(
            used <= inst.capacity,
            "capacity exceeded at time {t}: {used} > {}",
            inst.capacity
        );
    }
}

proptest! {
    #[test]
    fn cycle_prediction_matches_reality(g in digraph_strategy(8), u in 0usize..8, v in 0usize..8) {
        let n = g.node_count();
        prop_assume!(u < n && v < n && u != v);
        prop_assume!(!g.has_edge(u, v));
        let predicted = g.would_create_cycle(u, v).unwrap();
        let actual = !g.with_edge(u, v, 0).unwrap().is_acyclic();
        prop_assert_eq!(predicted, actual);
    }

    #[test]
    fn topological_order_is_a_valid_permutation(g in digraph_strategy(9)) {
        let order = g.topological_order().unwrap();
        let n = g.node_count();
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            prop_assert!(v < n);
            prop_assert_eq!(rank[v], usize::MAX, "node listed twice");
            rank[v] = i;
        }
        prop_assert_eq!(order.len(), n);
        for (u, v, _) in g.edges() {
            prop_assert!(rank[u] < rank[v]);
        }
    }

    #[test]
    fn reverse_is_an_involution(g in digraph_strategy(9)) {
        let back: Vec<_> = g.reverse().reverse().edges().collect();
        let original: Vec<_> = g.edges().collect();
        prop_assert_eq!(back, original);
    }

    #[test]
    fn list_schedules_are_feasible(inst in dag_instance_strategy(), sjf in any::<bool>()) {
        let heuristic = if sjf { DagHeuristic::Sjf } else { DagHeuristic::CriticalPath };
        let schedule = dag::solve_dag(&inst, &inst.graph, heuristic).unwrap();
        assert_schedule_feasible(&inst, &schedule.start_us, schedule.makespan_us);
    }

    #[test]
    fn heuristic_mappings_price_like_the_cost_function(
        g1 in labeled_graph_strategy(7),
        g2 in labeled_graph_strategy(7),
        ipfp in any::<bool>(),
    ) {
        let costs = CostModel::default();
        let result = if ipfp {
            ged::ipfp_ged(&g1, &g2, &costs, None, IpfpParams::default()).unwrap()
        } else {
            ged::hungarian_ged(&g1, &g2, &costs).unwrap()
        };
        let repriced = ged::edit_cost(&g1, &g2, &result.mapping, &costs).unwrap();
        prop_assert_eq!(result.cost, repriced);
        if g1.node_count() + g2.node_count() <= 10 {
            let exact = ged::brute_force_ged(&g1, &g2, &costs).unwrap();
            prop_assert!(result.cost >= exact.cost);
        }
    }

    #[test]
    fn tour_length_counts_missing_edges(
        h in hcp_strategy(9),
        seed in any::<u64>(),
    ) {
        let m = hcp::hcp_to_tsp(&h);
        let tour = hcp::lk_search(&m, 2, seed).unwrap();
        let order = tour.order();
        let n = order.len();
        let missing = (0..n)
            .filter(|&i| !h.has_edge(order[i], order[(i + 1) % n]))
            .count() as u64;
        prop_assert_eq!(hcp::tour_length(&m, &tour).unwrap(), missing);
    }

    #[test]
    fn random_tours_price_symmetrically(h in hcp_strategy(8), rot in 0usize..8) {
        // A tour and its rotation or reversal cover the same edge set.
        let m = hcp::hcp_to_tsp(&h);
        let n = h.node_count();
        let base: Vec<usize> = (0..n).collect();
        let rotated: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let reversed: Vec<usize> = base.iter().rev().copied().collect();
        let cost = |o: Vec<usize>| hcp::tour_length(&m, &Tour::new(o).unwrap()).unwrap();
        prop_assert_eq!(cost(base.clone()), cost(rotated));
        prop_assert_eq!(cost(base), cost(reversed));
    }
}

fn episode_cases() -> impl Strategy<Value = (Instance, LowerHeuristic)> {
    let dag = (dag_instance_strategy(), any::<bool>()).prop_map(|(inst, sjf)| {
        let h = if sjf { LowerHeuristic::Sjf } else { LowerHeuristic::CriticalPath };
        (Instance::Dag(inst), h)
    });
    let ged = (labeled_graph_strategy(6), labeled_graph_strategy(6), any::<bool>()).prop_map(
        |(g1, g2, ipfp)| {
            let h = if ipfp { LowerHeuristic::Ipfp } else { LowerHeuristic::Hungarian };
            (Instance::Ged(g1, g2), h)
        },
    );
    let hcp = (hcp_strategy(8), 0u8..3).prop_map(|(h, which)| {
        let heuristic = match which {
            0 => LowerHeuristic::Nn,
            1 => LowerHeuristic::Fi,
            _ => LowerHeuristic::LkFast,
        };
        (Instance::Hcp(h), heuristic)
    });
    prop_oneof![dag, ged, hcp]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn episodes_telescope_and_track_the_incumbent(
        (instance, heuristic) in episode_cases(),
        steps in 1usize..4,
        env_seed in any::<u64>(),
        policy_seed in any::<u64>(),
    ) {
        let config = EnvConfig::new(steps, heuristic, env_seed).unwrap();
        let mut state = match env::reset(instance, config) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let mut policy = RandomPolicy::new(policy_seed);
        let initial = state.last_objective();
        let mut total_reward = 0i64;
        let mut best_seen = initial;
        while !state.done() {
            let action = policy.choose(&state).unwrap();
            let outcome = state.step(action).unwrap();
            total_reward += outcome.reward;
            best_seen = best_seen.min(outcome.objective);
            prop_assert_eq!(outcome.state.incumbent_objective(), best_seen);
            state = outcome.state;
        }
        prop_assert_eq!(total_reward, initial - state.last_objective());
    }
}
