//! Baseline upper-level policies: uniform random, greedy, and beam search.
//!
//! Greedy and beam share one candidate mechanism. At a node with action
//! history `h` and depth `k`, a ChaCha stream derived from `(seed, k,
//! hash(h))` samples up to `candidates` legal pairs uniformly without
//! replacement; each candidate is evaluated with one lower-level solve.
//! Greedy commits to the candidate with the lowest child objective. Beam
//! search keeps the `width` best children across the whole level by the same
//! key, tracks the best objective seen anywhere in the tree, and stops early
//! once that incumbent reaches zero, which no later solution can beat.
//!
//! With `width == 1` beam search visits exactly the greedy trajectory; a test
//! below pins that equivalence.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{self, ActionPair, EnvConfig, EnvState, Instance, Policy, ProblemKind, Solution};
use crate::error::{CoreError, Result};
use crate::rng;

/// Beam widths used by the stock experiment configurations.
pub fn default_beam_width(kind: ProblemKind) -> usize {
    match kind {
        ProblemKind::Dag => 3,
        ProblemKind::Ged => 3,
        ProblemKind::Hcp => 12,
    }
}

pub const DEFAULT_CANDIDATES: usize = 20;

fn lineage_hash(actions: &[ActionPair]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for &(a1, a2) in actions {
        h = rng::mix(h ^ rng::mix(((a1 as u64) << 32) | a2 as u64));
    }
    h
}

/// RNG for candidate sampling at one search node, reproducible from the
/// policy seed, the depth, and the node's action history.
pub fn candidate_rng(seed: u64, depth: usize, lineage: &[ActionPair]) -> ChaCha8Rng {
    rng::stream_rng(rng::derive(rng::derive(seed, depth as u64), lineage_hash(lineage)), 0)
}

/// All legal `(a1, a2)` pairs of a state, ascending.
pub fn enumerate_legal_pairs(state: &EnvState) -> Result<Vec<ActionPair>> {
    let mut pairs = Vec::new();
    for a1 in state.legal_actions(None)? {
        for a2 in state.legal_actions(Some(a1))? {
            pairs.push((a1, a2));
        }
    }
    Ok(pairs)
}

/// Up to `budget` legal pairs, drawn uniformly without replacement.
pub fn sample_candidate_pairs(
    state: &EnvState,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ActionPair>> {
    let mut pairs = enumerate_legal_pairs(state)?;
    let keep = budget.min(pairs.len());
    for i in 0..keep {
        let j = rng.gen_range(i..pairs.len());
        pairs.swap(i, j);
    }
    pairs.truncate(keep);
    Ok(pairs)
}

/// Uniform two-stage baseline: `a1` uniform over nodes with a legal partner,
/// then `a2` uniform over that node's partners.
#[derive(Debug)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: rng::stream_rng(seed, 0),
        }
    }
}

impl Policy for RandomPolicy {
    fn choose(&mut self, state: &EnvState) -> Result<ActionPair> {
        let firsts = state.legal_actions(None)?;
        if firsts.is_empty() {
            return Err(CoreError::Contract("no legal action available"));
        }
        let a1 = firsts[self.rng.gen_range(0..firsts.len())];
        let seconds = state.legal_actions(Some(a1))?;
        let a2 = seconds[self.rng.gen_range(0..seconds.len())];
        Ok((a1, a2))
    }
}

/// One-step lookahead: evaluates sampled candidates and commits to the lowest
/// child objective, earliest sample on ties. `solves` counts the lookahead
/// evaluations it spent.
#[derive(Debug)]
pub struct GreedyPolicy {
    seed: u64,
    candidates: usize,
    pub solves: u64,
}

impl GreedyPolicy {
    pub fn new(seed: u64, candidates: usize) -> Result<Self> {
        if candidates == 0 {
            return Err(CoreError::Contract("candidate budget must be at least 1"));
        }
        Ok(GreedyPolicy {
            seed,
            candidates,
            solves: 0,
        })
    }
}

impl Policy for GreedyPolicy {
    fn choose(&mut self, state: &EnvState) -> Result<ActionPair> {
        let mut rng = candidate_rng(self.seed, state.k(), state.history());
        let pairs = sample_candidate_pairs(state, self.candidates, &mut rng)?;
        let mut best: Option<(i64, ActionPair)> = None;
        for pair in pairs {
            let outcome = state.step(pair)?;
            self.solves += 1;
            if best.is_none_or(|(obj, _)| outcome.objective < obj) {
                best = Some((outcome.objective, pair));
            }
        }
        match best {
            Some((_, pair)) => Ok(pair),
            None => Err(CoreError::Contract("no legal action available")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BeamConfig {
    pub width: usize,
    pub candidates: usize,
    pub seed: u64,
}

impl BeamConfig {
    pub fn new(width: usize, candidates: usize, seed: u64) -> Result<Self> {
        if width == 0 {
            return Err(CoreError::Contract("beam width must be at least 1"));
        }
        if candidates == 0 {
            return Err(CoreError::Contract("candidate budget must be at least 1"));
        }
        Ok(BeamConfig {
            width,
            candidates,
            seed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub initial_objective: i64,
    pub incumbent_objective: i64,
    pub incumbent_solution: Solution,
    /// Actions leading to the node where the incumbent was found.
    pub incumbent_actions: Vec<ActionPair>,
    /// Histories of the surviving beam nodes after the last expanded level.
    pub trajectories: Vec<Vec<ActionPair>>,
    pub lower_solves: u64,
}

/// Beam search over environment states. Every candidate evaluation costs one
/// lower-level solve; `lower_solves` reports the exact count, including the
/// root solve.
pub fn beam_search(instance: Instance, env_cfg: EnvConfig, beam_cfg: BeamConfig) -> Result<SearchResult> {
    let root = env::reset(instance, env_cfg)?;
    let mut result = SearchResult {
        initial_objective: root.last_objective(),
        incumbent_objective: root.last_objective(),
        incumbent_solution: root.last_solution().clone(),
        incumbent_actions: Vec::new(),
        trajectories: Vec::new(),
        lower_solves: 1,
    };
    if result.incumbent_objective == 0 {
        result.trajectories = vec![Vec::new()];
        return Ok(result);
    }
    let mut beam = vec![root];
    for depth in 0..env_cfg.max_steps {
        let mut children: Vec<(i64, usize, EnvState)> = Vec::new();
        for node in &beam {
            if node.done() {
                continue;
            }
            let mut rng = candidate_rng(beam_cfg.seed, depth, node.history());
            for pair in sample_candidate_pairs(node, beam_cfg.candidates, &mut rng)? {
                let outcome = node.step(pair)?;
                result.lower_solves += 1;
                if outcome.objective < result.incumbent_objective {
                    result.incumbent_objective = outcome.objective;
                    result.incumbent_solution = outcome.state.last_solution().clone();
                    result.incumbent_actions = outcome.state.history().to_vec();
                    if result.incumbent_objective == 0 {
                        result.trajectories = vec![result.incumbent_actions.clone()];
                        return Ok(result);
                    }
                }
                let seq = children.len();
                children.push((outcome.objective, seq, outcome.state));
            }
        }
        if children.is_empty() {
            break;
        }
        children.sort_by_key(|&(objective, seq, _)| (objective, seq));
        children.truncate(beam_cfg.width);
        beam = children.into_iter().map(|(_, _, state)| state).collect();
    }
    result.trajectories = beam.iter().map(|s| s.history().to_vec()).collect();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{run_episode, LowerHeuristic};
    use crate::graph::{DagInstance, HcpInstance, LabeledGraph, WeightedDigraph};

    fn wide_dag() -> Instance {
        // Two chains and two free riders competing for capacity 4.
        let mut g = WeightedDigraph::new(6);
        g.add_edge(0, 1, 0).unwrap();
        g.add_edge(1, 2, 0).unwrap();
        g.add_edge(3, 4, 0).unwrap();
        let inst = DagInstance::new(
            g,
            vec![5_000_000, 3_000_000, 4_000_000, 6_000_000, 2_000_000, 7_000_000],
            vec![2, 3, 2, 2, 3, 2],
            4,
        )
        .unwrap();
        Instance::Dag(inst)
    }

    fn ged_pair() -> Instance {
        let mut g1 = LabeledGraph::new(vec![0, 1, 0, 1]);
        g1.add_edge(0, 1).unwrap();
        g1.add_edge(1, 2).unwrap();
        g1.add_edge(2, 3).unwrap();
        let mut g2 = LabeledGraph::new(vec![0, 1, 1, 0]);
        g2.add_edge(0, 1).unwrap();
        g2.add_edge(1, 3).unwrap();
        g2.add_edge(0, 2).unwrap();
        g2.add_edge(2, 3).unwrap();
        Instance::Ged(g1, g2)
    }

    fn sparse_hcp() -> Instance {
        // A broken ring: node 7 has degree 1, so no tour ever reaches
        // objective zero and searches always run their full budget.
        let mut edges = vec![];
        for i in 0..7usize {
            edges.push((i, i + 1));
        }
        edges.push((0, 4));
        edges.push((2, 6));
        Instance::Hcp(HcpInstance::new(8, &edges).unwrap())
    }

    #[test]
    fn sampled_pairs_are_legal_and_distinct() {
        let state = env::reset(wide_dag(), EnvConfig::new(4, LowerHeuristic::CriticalPath, 5).unwrap())
            .unwrap();
        let all = enumerate_legal_pairs(&state).unwrap();
        let mut seen_union = alloc::collections::BTreeSet::new();
        for draw in 0..200u64 {
            let mut rng = rng::stream_rng(draw, 7);
            let picked = sample_candidate_pairs(&state, 5, &mut rng).unwrap();
            assert_eq!(picked.len(), 5.min(all.len()));
            let set: alloc::collections::BTreeSet<_> = picked.iter().copied().collect();
            assert_eq!(set.len(), picked.len(), "duplicates in draw {draw}");
            for pair in &picked {
                assert!(all.contains(pair), "{pair:?} is not legal");
                seen_union.insert(*pair);
            }
        }
        assert_eq!(seen_union.len(), all.len(), "sampling never covered all pairs");
    }

    #[test]
    fn random_policy_is_uniform_in_two_stages() {
        // On the pentagon the tour is 0..4, so each node has exactly two
        // partners and all 10 pairs should land near 10% of draws.
        let c5 = Instance::Hcp(
            HcpInstance::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap(),
        );
        let state = env::reset(c5, EnvConfig::new(4, LowerHeuristic::Nn, 0).unwrap()).unwrap();
        let mut policy = RandomPolicy::new(42);
        let mut counts = alloc::collections::BTreeMap::new();
        let draws = 100_000usize;
        for _ in 0..draws {
            let pair = policy.choose(&state).unwrap();
            *counts.entry(pair).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        let expected = draws / 10;
        for (pair, count) in counts {
            // 3 sigma for Binomial(1e5, 0.1) is about 285.
            assert!(
                count.abs_diff(expected) < 300,
                "pair {pair:?} drawn {count} times, expected about {expected}"
            );
        }
    }

    #[test]
    fn greedy_matches_width_one_beam() {
        let cases = [
            (wide_dag(), LowerHeuristic::CriticalPath, 4),
            (ged_pair(), LowerHeuristic::Hungarian, 4),
            (sparse_hcp(), LowerHeuristic::Nn, 4),
        ];
        for (instance, heuristic, steps) in cases {
            for seed in 0..3u64 {
                let env_cfg = EnvConfig::new(steps, heuristic, 11).unwrap();
                let beam = beam_search(
                    instance.clone(),
                    env_cfg,
                    BeamConfig::new(1, 6, seed).unwrap(),
                )
                .unwrap();
                let mut greedy = GreedyPolicy::new(seed, 6).unwrap();
                let episode = run_episode(instance.clone(), env_cfg, &mut greedy).unwrap();
                assert_eq!(
                    beam.trajectories,
                    vec![episode.final_state.history().to_vec()],
                    "trajectories diverge for {} seed {seed}",
                    heuristic.name()
                );
                // The committed greedy child is always the best candidate of
                // its level, so both searches see the same minimum.
                assert_eq!(beam.incumbent_objective, episode.incumbent_objective);
            }
        }
    }

    #[test]
    fn wider_beams_never_lose_to_greedy() {
        for seed in 0..4u64 {
            let env_cfg = EnvConfig::new(4, LowerHeuristic::CriticalPath, 3).unwrap();
            let narrow = beam_search(
                wide_dag(),
                env_cfg,
                BeamConfig::new(1, 4, seed).unwrap(),
            )
            .unwrap();
            let wide = beam_search(
                wide_dag(),
                env_cfg,
                BeamConfig::new(3, 4, seed).unwrap(),
            )
            .unwrap();
            assert!(wide.incumbent_objective <= narrow.incumbent_objective);
            assert!(wide.incumbent_objective <= wide.initial_objective);
        }
    }

    #[test]
    fn beam_budget_accounting_is_exact() {
        // Edge toggles keep the whole pair space legal, so every level is
        // fully expanded: 1 root solve, then candidates, then width times
        // candidates per remaining level.
        let (width, candidates, steps) = (2usize, 3usize, 4usize);
        let env_cfg = EnvConfig::new(steps, LowerHeuristic::Hungarian, 17).unwrap();
        let result = beam_search(
            ged_pair(),
            env_cfg,
            BeamConfig::new(width, candidates, 5).unwrap(),
        )
        .unwrap();
        assert!(result.incumbent_objective > 0, "early stop would skew the count");
        let expected = 1 + candidates + (steps - 1) * width * candidates;
        assert_eq!(result.lower_solves, expected as u64);
    }

    #[test]
    fn beam_stops_at_zero_incumbent() {
        let c5 = Instance::Hcp(
            HcpInstance::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap(),
        );
        let env_cfg = EnvConfig::new(8, LowerHeuristic::LkFast, 2).unwrap();
        let result = beam_search(c5, env_cfg, BeamConfig::new(12, 12, 0).unwrap()).unwrap();
        assert_eq!(result.incumbent_objective, 0);
        assert_eq!(result.lower_solves, 1, "the root solve already finds the cycle");
        assert!(result.incumbent_actions.is_empty());
    }

    #[test]
    fn incumbent_actions_replay_to_the_incumbent_objective() {
        for seed in 0..3u64 {
            let env_cfg = EnvConfig::new(4, LowerHeuristic::CriticalPath, 21).unwrap();
            let result = beam_search(
                wide_dag(),
                env_cfg,
                BeamConfig::new(3, 5, seed).unwrap(),
            )
            .unwrap();
            let mut state = env::reset(wide_dag(), env_cfg).unwrap();
            for &pair in &result.incumbent_actions {
                state = state.step(pair).unwrap().state;
            }
            assert_eq!(state.last_objective(), result.incumbent_objective);
        }
    }
}
