use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bihyb_cli::{experiment, format, generate, protocol};
use bihyb_core::env::{self, EnvConfig, Instance, LowerHeuristic, ProblemKind, Solution};
use bihyb_core::rng::stream_rng;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bihyb",
    version,
    about = "Bi-level hybrid solvers for DAG scheduling, graph edit distance, and hamiltonian cycle search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded instance files
    Generate(GenerateArgs),
    /// Run one lower-level heuristic on one instance
    Solve(SolveArgs),
    /// Run the bi-level search on one instance
    Bihyb(BihybArgs),
    /// Serve the JSON line protocol on stdio or TCP
    Serve(ServeArgs),
    /// Run an experiment spec, write CSV, optionally print a summary table
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// dag, ged, or hcp
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,
    /// Jobs per scheduling instance
    #[arg(long, default_value_t = 50)]
    jobs: usize,
    /// Nodes per graph (ged and hcp)
    #[arg(long)]
    nodes: Option<usize>,
    /// Extra edges per node on top of the planted cycle (hcp)
    #[arg(long, default_value_t = 3.0)]
    noise: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    heuristic: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include the solution itself in the output
    #[arg(long)]
    solution: bool,
}

#[derive(Args)]
struct BihybArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    heuristic: String,
    /// none, random, greedy, or beam
    #[arg(long, default_value = "beam")]
    policy: String,
    /// Modification steps; defaults to 20 (dag), 10 (ged), 8 (hcp)
    #[arg(long)]
    steps: Option<usize>,
    /// Beam width; defaults to 3 (dag), 3 (ged), 12 (hcp)
    #[arg(long)]
    width: Option<usize>,
    /// Candidate actions evaluated per expanded node
    #[arg(long, default_value_t = bihyb_core::policy::DEFAULT_CANDIDATES)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ServeArgs {
    /// Listen address like 127.0.0.1:7171; without it, serve a single
    /// session on stdin/stdout
    #[arg(long)]
    tcp: Option<String>,
    /// Stop after this many TCP connections
    #[arg(long)]
    max_conns: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Experiment spec JSON
    #[arg(long)]
    spec: PathBuf,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the aggregated summary table
    #[arg(long)]
    table: bool,
}

fn parse_heuristic(s: &str) -> Result<LowerHeuristic> {
    LowerHeuristic::parse(s).with_context(|| {
        format!(
            "unknown heuristic {s:?}; expected one of critical_path, sjf, hungarian, ipfp, nn, fi, lk_fast, lk_accu"
        )
    })
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let problem = ProblemKind::parse(&args.problem)
        .with_context(|| format!("unknown problem {:?}; expected dag, ged, or hcp", args.problem))?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for i in 0..args.count {
        let mut rng = stream_rng(args.seed, i as u64);
        let path = args.out.join(format!("{}_{i:03}.json", problem.name()));
        match problem {
            ProblemKind::Dag => {
                let inst = generate::generate_dag(args.jobs, &mut rng);
                format::save_instance(&path, &Instance::Dag(inst))?;
            }
            ProblemKind::Ged => {
                let n = args.nodes.unwrap_or(24);
                let (g1, g2) = generate::generate_ged(n, &mut rng);
                format::save_instance(&path, &Instance::Ged(g1, g2))?;
            }
            ProblemKind::Hcp => {
                let n = args.nodes.unwrap_or(100);
                let (inst, witness) = generate::generate_hcp(n, args.noise, &mut rng);
                format::save_instance(&path, &Instance::Hcp(inst))?;
                let witness_path = args.out.join(format!("{}_{i:03}.witness.json", problem.name()));
                fs::write(&witness_path, json!({ "cycle": witness }).to_string() + "\n")
                    .with_context(|| format!("writing {}", witness_path.display()))?;
            }
        }
        println!("{}", path.display());
    }
    Ok(())
}

fn solution_json(solution: &Solution) -> serde_json::Value {
    match solution {
        Solution::Schedule(s) => json!({ "start_us": s.start_us, "makespan_us": s.makespan_us }),
        Solution::Mapping(m) => json!({ "mapping": m.assign() }),
        Solution::Tour(t) => json!({ "tour": t.order() }),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let instance = format::load_instance(&args.instance)?;
    let heuristic = parse_heuristic(&args.heuristic)?;
    let config = EnvConfig::new(1, heuristic, args.seed)
        .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
    let state = env::reset(instance, config).map_err(|e| anyhow::anyhow!("solve failed: {e}"))?;
    let mut payload = json!({
        "problem": state.instance().kind().name(),
        "heuristic": heuristic.name(),
        "objective": state.last_objective(),
    });
    if args.solution {
        payload["solution"] = solution_json(state.last_solution());
    }
    println!("{payload}");
    Ok(())
}

fn cmd_bihyb(args: BihybArgs) -> Result<()> {
    let instance = format::load_instance(&args.instance)?;
    let heuristic = parse_heuristic(&args.heuristic)?;
    if heuristic.problem() != instance.kind() {
        bail!(
            "heuristic {} solves {} instances, got {}",
            heuristic.name(),
            heuristic.problem().name(),
            instance.kind().name()
        );
    }
    let policy = experiment::PolicyKind::parse(&args.policy)
        .with_context(|| format!("unknown policy {:?}; expected none, random, greedy, or beam", args.policy))?;
    let steps = args
        .steps
        .unwrap_or_else(|| env::default_max_steps(instance.kind()));
    let width = args
        .width
        .unwrap_or_else(|| bihyb_core::policy::default_beam_width(instance.kind()));
    let outcome = experiment::run_policy(
        instance,
        heuristic,
        policy,
        steps,
        width,
        args.candidates,
        args.seed,
    )?;
    println!(
        "{}",
        json!({
            "initial": outcome.initial_objective,
            "incumbent": outcome.incumbent_objective,
            "lower_solves": outcome.lower_solves,
            "actions": outcome.actions,
        })
    );
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<()> {
    match args.tcp {
        Some(addr) => protocol::serve_tcp(addr.as_str(), args.max_conns)?,
        None => protocol::serve_stdio()?,
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let spec: experiment::ExperimentSpec =
        serde_json::from_str(&text).context("malformed experiment spec")?;
    let base_dir = args.spec.parent().unwrap_or_else(|| std::path::Path::new("."));
    let rows = experiment::run_experiment(&spec, base_dir)?;
    let csv = experiment::write_csv(&rows);
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    if args.table {
        print!("{}", experiment::render_table(&rows, &spec.baseline)?);
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bihyb(args) => cmd_bihyb(args),
        Command::Serve(args) => cmd_serve(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
