//! The bi-level graph-modification environment.
//!
//! An episode starts from an instance, solves it once with the configured
//! lower-level heuristic, and then plays up to `max_steps` modification
//! actions. Each action edits a working copy of the instance graph (DAG: add
//! a precedence edge that keeps the graph acyclic; GED: toggle an edge of the
//! first graph; HCP: add 10 to the weight of a current tour edge), the lower
//! level re-solves the modified instance, and the resulting solution is priced
//! against the untouched original. The reward of a step is the drop in that
//! original-instance objective, so rewards over an episode telescope exactly
//! to initial objective minus final objective.
//!
//! States are values: `step` returns a fresh state and never mutates the
//! receiver, which makes tree search over environment states trivial. The
//! original instance sits behind an `Arc` and is shared by all descendants of
//! a reset.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::dag::{self, DagHeuristic, Schedule};
use crate::error::{CoreError, Result};
use crate::ged::{self, CostModel, IpfpParams, NodeMapping};
use crate::graph::{DagInstance, HcpInstance, LabeledGraph, NodeId, WeightedDigraph};
use crate::hcp::{self, Tour, TspMatrix};
use crate::rng;

pub const LK_FAST_RESTARTS: usize = 5;
pub const LK_ACCU_RESTARTS: usize = 100;

/// Weight added to a penalized tour edge. Repeated penalties compound.
pub const HCP_PENALTY: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Dag,
    Ged,
    Hcp,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Dag => "dag",
            ProblemKind::Ged => "ged",
            ProblemKind::Hcp => "hcp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dag" => Some(ProblemKind::Dag),
            "ged" => Some(ProblemKind::Ged),
            "hcp" => Some(ProblemKind::Hcp),
            _ => None,
        }
    }
}

/// Episode step budgets used throughout: 20 for scheduling, 10 for edit
/// distance, 8 for cycle search.
pub fn default_max_steps(kind: ProblemKind) -> usize {
    match kind {
        ProblemKind::Dag => 20,
        ProblemKind::Ged => 10,
        ProblemKind::Hcp => 8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerHeuristic {
    CriticalPath,
    Sjf,
    Hungarian,
    Ipfp,
    Nn,
    Fi,
    LkFast,
    LkAccu,
}

impl LowerHeuristic {
    pub fn problem(self) -> ProblemKind {
        match self {
            LowerHeuristic::CriticalPath | LowerHeuristic::Sjf => ProblemKind::Dag,
            LowerHeuristic::Hungarian | LowerHeuristic::Ipfp => ProblemKind::Ged,
            LowerHeuristic::Nn | LowerHeuristic::Fi | LowerHeuristic::LkFast | LowerHeuristic::LkAccu => {
                ProblemKind::Hcp
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LowerHeuristic::CriticalPath => "critical_path",
            LowerHeuristic::Sjf => "sjf",
            LowerHeuristic::Hungarian => "hungarian",
            LowerHeuristic::Ipfp => "ipfp",
            LowerHeuristic::Nn => "nn",
            LowerHeuristic::Fi => "fi",
            LowerHeuristic::LkFast => "lk_fast",
            LowerHeuristic::LkAccu => "lk_accu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "critical_path" => Some(LowerHeuristic::CriticalPath),
            "sjf" => Some(LowerHeuristic::Sjf),
            "hungarian" => Some(LowerHeuristic::Hungarian),
            "ipfp" => Some(LowerHeuristic::Ipfp),
            "nn" => Some(LowerHeuristic::Nn),
            "fi" => Some(LowerHeuristic::Fi),
            "lk_fast" => Some(LowerHeuristic::LkFast),
            "lk_accu" => Some(LowerHeuristic::LkAccu),
            _ => None,
        }
    }
}

/// One problem instance, by kind.
#[derive(Debug, Clone)]
pub enum Instance {
    Dag(DagInstance),
    Ged(LabeledGraph, LabeledGraph),
    Hcp(HcpInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Dag(_) => ProblemKind::Dag,
            Instance::Ged(_, _) => ProblemKind::Ged,
            Instance::Hcp(_) => ProblemKind::Hcp,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnvConfig {
    pub max_steps: usize,
    pub heuristic: LowerHeuristic,
    pub seed: u64,
}

impl EnvConfig {
    pub fn new(max_steps: usize, heuristic: LowerHeuristic, seed: u64) -> Result<Self> {
        if max_steps == 0 {
            return Err(CoreError::Contract("max_steps must be at least 1"));
        }
        Ok(EnvConfig {
            max_steps,
            heuristic,
            seed,
        })
    }
}

/// Lower-level solution, by problem kind. Solutions are always feasible for
/// the original instance, whatever modified graph they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Schedule(Schedule),
    Mapping(NodeMapping),
    Tour(Tour),
}

/// The modifiable working copy the lower level solves on.
#[derive(Debug, Clone)]
pub enum WorkingGraph {
    Dag(WeightedDigraph),
    Ged(LabeledGraph),
    Hcp(TspMatrix),
}

pub type ActionPair = (NodeId, NodeId);

#[derive(Debug, Clone)]
pub struct EnvState {
    instance: Arc<Instance>,
    config: EnvConfig,
    working: WorkingGraph,
    k: usize,
    done: bool,
    last_solution: Solution,
    last_objective: i64,
    incumbent_solution: Solution,
    incumbent_objective: i64,
    history: Vec<ActionPair>,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub reward: i64,
    pub objective: i64,
    pub done: bool,
    pub state: EnvState,
}

/// Node feature tables, current edge lists, and episode scalars, precomputed
/// so external consumers need no problem-specific logic beyond encoding.
///
/// Feature layouts: DAG `[duration_secs, resource, start_secs, completion_fraction]`;
/// GED `nodes` rows are `[label, node_op_cost]` for the working first graph and
/// `nodes2` rows are `[label, covered]` for the second; HCP `[degree, tour_mismatch]`.
/// `edges` lists the working graph (HCP: every pair whose weight differs from 1);
/// `edges2` is the GED second graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub problem: ProblemKind,
    pub k: usize,
    pub max_steps: usize,
    pub objective: i64,
    pub done: bool,
    pub nodes: Vec<Vec<f64>>,
    pub edges: Vec<(NodeId, NodeId, u64)>,
    pub nodes2: Vec<Vec<f64>>,
    pub edges2: Vec<(NodeId, NodeId, u64)>,
}

fn solve_lower(
    instance: &Instance,
    working: &WorkingGraph,
    config: &EnvConfig,
    k: usize,
) -> Result<(Solution, i64)> {
    let solve_seed = rng::derive(config.seed, k as u64);
    match (instance, working) {
        (Instance::Dag(inst), WorkingGraph::Dag(precedence)) => {
            let heuristic = match config.heuristic {
                LowerHeuristic::CriticalPath => DagHeuristic::CriticalPath,
                LowerHeuristic::Sjf => DagHeuristic::Sjf,
                _ => return Err(CoreError::Contract("heuristic does not match problem kind")),
            };
            let modified = dag::solve_dag(inst, precedence, heuristic)?;
            // Score on the original instance: replay the start order found on
            // the modified precedence under the original precedence.
            let replay = dag::simulate_list_schedule(inst, &modified.start_order(), &inst.graph)?;
            let objective = replay.makespan_us as i64;
            Ok((Solution::Schedule(replay), objective))
        }
        (Instance::Ged(g1, g2), WorkingGraph::Ged(working_g1)) => {
            let costs = CostModel::default();
            let result = match config.heuristic {
                LowerHeuristic::Hungarian => ged::hungarian_ged(working_g1, g2, &costs)?,
                LowerHeuristic::Ipfp => {
                    ged::ipfp_ged(working_g1, g2, &costs, None, IpfpParams::default())?
                }
                _ => return Err(CoreError::Contract("heuristic does not match problem kind")),
            };
            // The mapping was found on the toggled graph; price it on the
            // original one.
            let objective = ged::edit_cost(g1, g2, &result.mapping, &costs)? as i64;
            Ok((Solution::Mapping(result.mapping), objective))
        }
        (Instance::Hcp(h), WorkingGraph::Hcp(matrix)) => {
            let tour = match config.heuristic {
                LowerHeuristic::Nn => hcp::nearest_neighbor(matrix, 0)?,
                LowerHeuristic::Fi => hcp::farthest_insertion(matrix)?,
                LowerHeuristic::LkFast => hcp::lk_search(matrix, LK_FAST_RESTARTS, solve_seed)?,
                LowerHeuristic::LkAccu => hcp::lk_search(matrix, LK_ACCU_RESTARTS, solve_seed)?,
                _ => return Err(CoreError::Contract("heuristic does not match problem kind")),
            };
            // Count original non-edges along the tour: the pristine objective,
            // blind to whatever penalties the working matrix carries.
            let order = tour.order();
            let n = order.len();
            let objective = (0..n)
                .filter(|&i| !h.has_edge(order[i], order[(i + 1) % n]))
                .count() as i64;
            Ok((Solution::Tour(tour), objective))
        }
        _ => Err(CoreError::Contract("instance and working graph kinds diverged")),
    }
}

/// Starts an episode: validates the heuristic against the instance kind,
/// solves the unmodified instance once, and seeds the incumbent with that
/// baseline solution.
pub fn reset(instance: Instance, config: EnvConfig) -> Result<EnvState> {
    if config.max_steps == 0 {
        return Err(CoreError::Contract("max_steps must be at least 1"));
    }
    if config.heuristic.problem() != instance.kind() {
        return Err(CoreError::Contract("heuristic does not match problem kind"));
    }
    let working = match &instance {
        Instance::Dag(inst) => WorkingGraph::Dag(inst.graph.clone()),
        Instance::Ged(g1, _) => WorkingGraph::Ged(g1.clone()),
        Instance::Hcp(h) => WorkingGraph::Hcp(hcp::hcp_to_tsp(h)),
    };
    let (solution, objective) = solve_lower(&instance, &working, &config, 0)?;
    let mut state = EnvState {
        instance: Arc::new(instance),
        config,
        working,
        k: 0,
        done: false,
        last_solution: solution.clone(),
        last_objective: objective,
        incumbent_solution: solution,
        incumbent_objective: objective,
        history: Vec::new(),
    };
    state.done = !state.has_legal_action();
    Ok(state)
}

impl EnvState {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_steps(&self) -> usize {
        self.config.max_steps
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn working(&self) -> &WorkingGraph {
        &self.working
    }

    pub fn last_solution(&self) -> &Solution {
        &self.last_solution
    }

    pub fn last_objective(&self) -> i64 {
        self.last_objective
    }

    pub fn incumbent_solution(&self) -> &Solution {
        &self.incumbent_solution
    }

    pub fn incumbent_objective(&self) -> i64 {
        self.incumbent_objective
    }

    pub fn history(&self) -> &[ActionPair] {
        &self.history
    }

    /// Legal action components. With `a1 == None`, the nodes usable as the
    /// first component; otherwise the nodes usable as the second component
    /// next to that first choice. Always ascending.
    pub fn legal_actions(&self, a1: Option<NodeId>) -> Result<Vec<NodeId>> {
        match &self.working {
            WorkingGraph::Dag(g) => match a1 {
                None => Ok((0..g.node_count())
                    .filter(|&u| !self.dag_legal_seconds(g, u).is_empty())
                    .collect()),
                Some(u) => {
                    if u >= g.node_count() {
                        return Err(CoreError::NodeOutOfRange {
                            node: u,
                            node_count: g.node_count(),
                        });
                    }
                    Ok(self.dag_legal_seconds(g, u))
                }
            },
            WorkingGraph::Ged(g1) => {
                let n1 = g1.node_count();
                match a1 {
                    None => {
                        if n1 < 2 {
                            Ok(Vec::new())
                        } else {
                            Ok((0..n1).collect())
                        }
                    }
                    Some(u) => {
                        if u >= n1 {
                            return Err(CoreError::NodeOutOfRange { node: u, node_count: n1 });
                        }
                        Ok((0..n1).filter(|&v| v != u).collect())
                    }
                }
            }
            WorkingGraph::Hcp(m) => {
                let Solution::Tour(tour) = &self.last_solution else {
                    return Err(CoreError::Contract("hcp state must hold a tour"));
                };
                match a1 {
                    None => Ok((0..m.n()).collect()),
                    Some(u) => {
                        let (a, b) = tour.neighbors_of(u)?;
                        Ok(vec![a, b])
                    }
                }
            }
        }
    }

    /// Seconds legal next to `u` on a DAG: nodes `v` with no existing edge
    /// `u -> v` and no path back from `v` to `u`.
    fn dag_legal_seconds(&self, g: &WeightedDigraph, u: NodeId) -> Vec<NodeId> {
        let n = g.node_count();
        // Everything that reaches u (against edge direction) is forbidden.
        let mut reaches_u = vec![false; n];
        reaches_u[u] = true;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &p in g.predecessors(x) {
                if !reaches_u[p] {
                    reaches_u[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..n)
            .filter(|&v| !reaches_u[v] && !g.has_edge(u, v))
            .collect()
    }

    /// True when `(a1, a2)` may be passed to `step` right now.
    pub fn is_legal(&self, a1: NodeId, a2: NodeId) -> bool {
        match &self.working {
            WorkingGraph::Dag(g) => {
                a1 < g.node_count()
                    && a2 < g.node_count()
                    && a1 != a2
                    && !g.has_edge(a1, a2)
                    && !g.would_create_cycle(a1, a2).unwrap_or(true)
            }
            WorkingGraph::Ged(g1) => a1 < g1.node_count() && a2 < g1.node_count() && a1 != a2,
            WorkingGraph::Hcp(_) => {
                let Solution::Tour(tour) = &self.last_solution else {
                    return false;
                };
                tour.neighbors_of(a1).is_ok_and(|(x, y)| a2 == x || a2 == y)
            }
        }
    }

    pub fn has_legal_action(&self) -> bool {
        match &self.working {
            WorkingGraph::Dag(g) => {
                (0..g.node_count()).any(|u| !self.dag_legal_seconds(g, u).is_empty())
            }
            WorkingGraph::Ged(g1) => g1.node_count() >= 2,
            WorkingGraph::Hcp(m) => m.n() >= 3,
        }
    }

    /// Applies one modification action, re-solves, and scores on the original
    /// instance. Illegal actions and finished episodes fail without producing
    /// a new state.
    pub fn step(&self, action: ActionPair) -> Result<StepOutcome> {
        if self.done {
            return Err(CoreError::EpisodeDone);
        }
        let (a1, a2) = action;
        if !self.is_legal(a1, a2) {
            return Err(CoreError::IllegalAction { a1, a2 });
        }
        let working = match &self.working {
            WorkingGraph::Dag(g) => WorkingGraph::Dag(g.with_edge(a1, a2, 0)?),
            WorkingGraph::Ged(g1) => WorkingGraph::Ged(g1.with_toggled_edge(a1, a2)?),
            WorkingGraph::Hcp(m) => WorkingGraph::Hcp(m.with_added_weight(a1, a2, HCP_PENALTY)?),
        };
        let k = self.k + 1;
        let (solution, objective) = solve_lower(&self.instance, &working, &self.config, k)?;
        let reward = self.last_objective - objective;

        let mut history = self.history.clone();
        history.push(action);
        let (incumbent_solution, incumbent_objective) =
            if objective < self.incumbent_objective {
                (solution.clone(), objective)
            } else {
                (self.incumbent_solution.clone(), self.incumbent_objective)
            };
        let mut state = EnvState {
            instance: Arc::clone(&self.instance),
            config: self.config,
            working,
            k,
            done: k >= self.config.max_steps,
            last_solution: solution,
            last_objective: objective,
            incumbent_solution,
            incumbent_objective,
            history,
        };
        if !state.done && !state.has_legal_action() {
            state.done = true;
        }
        Ok(StepOutcome {
            reward,
            objective,
            done: state.done,
            state,
        })
    }

    pub fn observe(&self) -> Observation {
        let mut obs = Observation {
            problem: self.instance.kind(),
            k: self.k,
            max_steps: self.config.max_steps,
            objective: self.last_objective,
            done: self.done,
            nodes: Vec::new(),
            edges: Vec::new(),
            nodes2: Vec::new(),
            edges2: Vec::new(),
        };
        match (&*self.instance, &self.working, &self.last_solution) {
            (Instance::Dag(inst), WorkingGraph::Dag(g), Solution::Schedule(sched)) => {
                let makespan = sched.makespan_us.max(1) as f64;
                obs.nodes = (0..inst.node_count())
                    .map(|v| {
                        let start = sched.start_us[v];
                        let finish = start + inst.duration_us[v];
                        vec![
                            inst.duration_us[v] as f64 / 1e6,
                            inst.resource[v] as f64,
                            start as f64 / 1e6,
                            finish as f64 / makespan,
                        ]
                    })
                    .collect();
                obs.edges = g.edges().collect();
            }
            (Instance::Ged(_, g2), WorkingGraph::Ged(g1), Solution::Mapping(mapping)) => {
                let mut covered = vec![0.0; g2.node_count()];
                obs.nodes = (0..g1.node_count())
                    .map(|v| {
                        let op_cost = match mapping.image(v) {
                            Some(j) => {
                                covered[j] = 1.0;
                                f64::from(g1.label(v) != g2.label(j))
                            }
                            None => 1.0,
                        };
                        vec![f64::from(g1.label(v)), op_cost]
                    })
                    .collect();
                obs.nodes2 = (0..g2.node_count())
                    .map(|j| vec![f64::from(g2.label(j)), covered[j]])
                    .collect();
                obs.edges = g1.edges().map(|(u, v)| (u, v, 1)).collect();
                obs.edges2 = g2.edges().map(|(u, v)| (u, v, 1)).collect();
            }
            (Instance::Hcp(h), WorkingGraph::Hcp(m), Solution::Tour(tour)) => {
                let n = h.node_count();
                let order = tour.order();
                let mut mismatch = vec![0.0f64; n];
                for i in 0..n {
                    let (a, b) = (order[i], order[(i + 1) % n]);
                    if !h.has_edge(a, b) {
                        mismatch[a] += 1.0;
                        mismatch[b] += 1.0;
                    }
                }
                obs.nodes = (0..n)
                    .map(|v| vec![h.degree(v) as f64, mismatch[v]])
                    .collect();
                for u in 0..n {
                    for v in u + 1..n {
                        let w = m.weight(u, v);
                        if w != 1 {
                            obs.edges.push((u, v, w));
                        }
                    }
                }
            }
            _ => unreachable!("state invariants tie instance, working graph, and solution kinds"),
        }
        obs
    }
}

/// Action source for `run_episode`.
pub trait Policy {
    fn choose(&mut self, state: &EnvState) -> Result<ActionPair>;
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub rewards: Vec<i64>,
    pub initial_objective: i64,
    pub final_objective: i64,
    pub incumbent_objective: i64,
    pub incumbent_solution: Solution,
    pub lower_solves: u64,
    pub final_state: EnvState,
}

/// Plays a full episode under `policy`. A policy returning an illegal action
/// aborts the episode with that diagnostic rather than skipping the step.
pub fn run_episode(
    instance: Instance,
    config: EnvConfig,
    policy: &mut dyn Policy,
) -> Result<EpisodeResult> {
    let mut state = reset(instance, config)?;
    let initial_objective = state.last_objective;
    let mut rewards = Vec::new();
    let mut lower_solves = 1u64;
    while !state.done {
        let action = policy.choose(&state)?;
        let outcome = state.step(action)?;
        lower_solves += 1;
        rewards.push(outcome.reward);
        state = outcome.state;
    }
    Ok(EpisodeResult {
        rewards,
        initial_objective,
        final_objective: state.last_objective,
        incumbent_objective: state.incumbent_objective,
        incumbent_solution: state.incumbent_solution.clone(),
        lower_solves,
        final_state: state,
    })
}
