//! Batch experiment runner: a JSON spec names instances, seeds, and methods;
//! the runner produces one CSV row per (method, instance, seed) and an
//! aligned summary table with improvement relative to a baseline method.
//!
//! With `record_time` off (the default) the `time_ms` column is written as 0,
//! so re-running a spec reproduces the CSV byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bihyb_core::env::{self, ActionPair, EnvConfig, Instance, LowerHeuristic};
use bihyb_core::policy::{beam_search, BeamConfig, GreedyPolicy, RandomPolicy};
use bihyb_core::rng;
use serde::{Deserialize, Serialize};

use crate::format::load_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Lower-level heuristic alone, no modification steps.
    #[default]
    None,
    Random,
    Greedy,
    Beam,
}

impl PolicyKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(PolicyKind::None),
            "random" => Some(PolicyKind::Random),
            "greedy" => Some(PolicyKind::Greedy),
            "beam" => Some(PolicyKind::Beam),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub heuristic: String,
    #[serde(default)]
    pub policy: PolicyKind,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub candidates: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instances: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub baseline: String,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub record_time: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub instance: String,
    pub seed: u64,
    pub objective: i64,
    pub time_ms: u64,
    pub lower_solves: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub initial_objective: i64,
    pub incumbent_objective: i64,
    pub lower_solves: u64,
    pub actions: Vec<ActionPair>,
}

/// Runs one method on one instance. The seed feeds both the environment's
/// solver streams and the policy's candidate sampling, so a (method,
/// instance, seed) triple is fully reproducible.
pub fn run_policy(
    instance: Instance,
    heuristic: LowerHeuristic,
    policy: PolicyKind,
    steps: usize,
    width: usize,
    candidates: usize,
    seed: u64,
) -> Result<RunOutcome> {
    let config = EnvConfig::new(steps, heuristic, seed)
        .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
    let policy_seed = rng::derive(seed, 0x706f_6c69);
    match policy {
        PolicyKind::None => {
            let state = env::reset(instance, config)
                .map_err(|e| anyhow::anyhow!("solve failed: {e}"))?;
            Ok(RunOutcome {
                initial_objective: state.last_objective(),
                incumbent_objective: state.last_objective(),
                lower_solves: 1,
                actions: Vec::new(),
            })
        }
        PolicyKind::Random => {
            let mut policy = RandomPolicy::new(policy_seed);
            let episode = env::run_episode(instance, config, &mut policy)
                .map_err(|e| anyhow::anyhow!("episode failed: {e}"))?;
            Ok(RunOutcome {
                initial_objective: episode.initial_objective,
                incumbent_objective: episode.incumbent_objective,
                lower_solves: episode.lower_solves,
                actions: episode.final_state.history().to_vec(),
            })
        }
        PolicyKind::Greedy => {
            let mut policy = GreedyPolicy::new(policy_seed, candidates)
                .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
            let episode = env::run_episode(instance, config, &mut policy)
                .map_err(|e| anyhow::anyhow!("episode failed: {e}"))?;
            Ok(RunOutcome {
                initial_objective: episode.initial_objective,
                incumbent_objective: episode.incumbent_objective,
                // Committed steps re-solve states the lookahead already paid
                // for, so only the lookahead evaluations and the root count.
                lower_solves: 1 + policy.solves,
                actions: episode.final_state.history().to_vec(),
            })
        }
        PolicyKind::Beam => {
            let beam_cfg = BeamConfig::new(width, candidates, policy_seed)
                .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
            let result = beam_search(instance, config, beam_cfg)
                .map_err(|e| anyhow::anyhow!("search failed: {e}"))?;
            Ok(RunOutcome {
                initial_objective: result.initial_objective,
                incumbent_objective: result.incumbent_objective,
                lower_solves: result.lower_solves,
                actions: result.incumbent_actions,
            })
        }
    }
}

fn method_run(instance: &Instance, method: &MethodSpec, seed: u64) -> Result<RunOutcome> {
    let heuristic = LowerHeuristic::parse(&method.heuristic)
        .with_context(|| format!("unknown heuristic {:?}", method.heuristic))?;
    let steps = method
        .steps
        .unwrap_or_else(|| env::default_max_steps(heuristic.problem()));
    let width = method
        .width
        .unwrap_or_else(|| bihyb_core::policy::default_beam_width(heuristic.problem()));
    let candidates = method.candidates.unwrap_or(bihyb_core::policy::DEFAULT_CANDIDATES);
    run_policy(
        instance.clone(),
        heuristic,
        method.policy,
        steps,
        width,
        candidates,
        seed,
    )
    .with_context(|| format!("method {:?}", method.name))
}

fn instance_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run_experiment(spec: &ExperimentSpec, base_dir: &Path) -> Result<Vec<ResultRow>> {
    if spec.methods.is_empty() {
        bail!("spec lists no methods");
    }
    if spec.instances.is_empty() {
        bail!("spec lists no instances");
    }
    if spec.seeds.is_empty() {
        bail!("spec lists no seeds");
    }
    if !spec.methods.iter().any(|m| m.name == spec.baseline) {
        bail!("baseline {:?} is not one of the methods", spec.baseline);
    }
    let mut instances = Vec::new();
    for rel in &spec.instances {
        let path = if rel.is_absolute() {
            rel.clone()
        } else {
            base_dir.join(rel)
        };
        instances.push((instance_stem(rel), load_instance(&path)?));
    }
    let mut rows = Vec::new();
    for method in &spec.methods {
        for (stem, instance) in &instances {
            for &seed in &spec.seeds {
                let start = Instant::now();
                let outcome = method_run(instance, method, seed)?;
                let time_ms = if spec.record_time {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                };
                rows.push(ResultRow {
                    method: method.name.clone(),
                    instance: stem.clone(),
                    seed,
                    objective: outcome.incumbent_objective,
                    time_ms,
                    lower_solves: outcome.lower_solves,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("method,instance,seed,objective,time_ms,lower_solves\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method, r.instance, r.seed, r.objective, r.time_ms, r.lower_solves
        )
        .unwrap();
    }
    out
}

/// Per-method summary with mean objective and mean improvement relative to
/// the baseline, averaged over (instance, seed) pairs where the baseline
/// objective is positive.
pub fn render_table(rows: &[ResultRow], baseline: &str) -> Result<String> {
    let mut baseline_of = std::collections::BTreeMap::new();
    for r in rows.iter().filter(|r| r.method == baseline) {
        baseline_of.insert((r.instance.clone(), r.seed), r.objective);
    }
    if baseline_of.is_empty() {
        bail!("no rows for baseline {baseline:?}");
    }
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.method.as_str()) {
            order.push(&r.method);
        }
    }
    let mut lines = Vec::new();
    for method in order {
        let method_rows: Vec<_> = rows.iter().filter(|r| r.method == method).collect();
        let runs = method_rows.len();
        let mean_obj: f64 =
            method_rows.iter().map(|r| r.objective as f64).sum::<f64>() / runs as f64;
        let solves: u64 = method_rows.iter().map(|r| r.lower_solves).sum();
        let mut rel_sum = 0.0;
        let mut rel_count = 0usize;
        for r in &method_rows {
            let Some(&base) = baseline_of.get(&(r.instance.clone(), r.seed)) else {
                continue;
            };
            if base > 0 {
                rel_sum += (r.objective - base) as f64 / base as f64 * 100.0;
                rel_count += 1;
            }
        }
        let rel = if rel_count > 0 {
            format!("{:+8.3}%", rel_sum / rel_count as f64)
        } else {
            "     n/a ".to_string()
        };
        lines.push((method.to_string(), runs, mean_obj, rel, solves));
    }
    let name_w = lines.iter().map(|l| l.0.len()).max().unwrap_or(6).max(6);
    let mut out = String::new();
    writeln!(
        out,
        "{:name_w$}  {:>5}  {:>16}  {:>9}  {:>12}",
        "method", "runs", "mean_objective", "vs_base", "lower_solves"
    )
    .unwrap();
    for (name, runs, mean_obj, rel, solves) in lines {
        writeln!(
            out,
            "{name:name_w$}  {runs:>5}  {mean_obj:>16.3}  {rel}  {solves:>12}"
        )
        .unwrap();
    }
    Ok(out)
}
