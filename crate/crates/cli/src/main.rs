//! Command-line runner for the crowdteam engine.
//!
//! Subcommands: `gen` (synthetic instance files), `solve` (one solver run),
//! `bench` (Monte Carlo solver comparison), `sweep` (exploration-threshold
//! sweep), `ranks` (abstract secretary statistics), `plot` (SVG charts from
//! the CSV outputs). Every run is deterministic given its flags; all
//! randomness flows from explicit 64-bit seeds.

mod plot;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crowdteam_core::efficiency::{PerceptionModel, ProjectSpec};
use crowdteam_core::experiment::{
    k_sweep_on, monte_carlo_on, rank_statistics, ExperimentParams, KSpec, MonteCarloReport,
    SpaceMode, TrialMetrics, SOLVER_EXHAUSTIVE, SOLVER_SECRETARY,
};
use crowdteam_core::model::{GenParams, Instance};
use crowdteam_core::solvers::{
    configuration_count, exhaustive_solver, exploration_threshold, secretary_solver, CountMode,
    ExplorationRule, Fallback, SolverReport,
};

/// Environment variable consulted for any seed flag left unset.
const SEED_ENV: &str = "CROWDTEAM_SEED";

#[derive(Parser)]
#[command(
    name = "crowdteam",
    version,
    about = "Team formation engine and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic worker-pool instance file.
    Gen(GenArgs),
    /// Solve one instance/project pair with a chosen solver.
    Solve(SolveArgs),
    /// Monte Carlo comparison of the exhaustive and secretary solvers.
    Bench(BenchArgs),
    /// Rerun the benchmark across a list of exploration thresholds.
    Sweep(SweepArgs),
    /// Abstract secretary rank statistics (no instances involved).
    Ranks(RanksArgs),
    /// Render a CSV produced by bench/sweep/ranks as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of workers in the pool.
    #[arg(long, default_value_t = 14)]
    workers: usize,
    /// Number of skills.
    #[arg(long, default_value_t = 5)]
    skills: usize,
    /// Edge probability of the social graph.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Generation seed (defaults to $CROWDTEAM_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path for the instance JSON.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Exhaustive,
    Secretary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FallbackArg {
    Last,
    BestSeen,
}

impl From<FallbackArg> for Fallback {
    fn from(value: FallbackArg) -> Self {
        match value {
            FallbackArg::Last => Fallback::Last,
            FallbackArg::BestSeen => Fallback::BestSeen,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Distinct,
    Paper,
}

impl From<SpaceArg> for SpaceMode {
    fn from(value: SpaceArg) -> Self {
        match value {
            SpaceArg::Distinct => SpaceMode::Distinct,
            SpaceArg::Paper => SpaceMode::Paper,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON produced by `gen`.
    #[arg(long)]
    instance: PathBuf,
    /// Project JSON: `{"required_skills": [..], "gamma": [g1,g2,g3,g4]}`.
    #[arg(long)]
    project: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Exploration length for the secretary solver (default: ceil(total/e)).
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, value_enum, default_value = "last")]
    fallback: FallbackArg,
    /// Perception noise scale at one hop.
    #[arg(long, default_value_t = 0.2)]
    sigma0: f64,
    #[arg(long)]
    noise_seed: Option<u64>,
    #[arg(long)]
    stream_seed: Option<u64>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    report_json: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentOverrides {
    /// Experiment-config JSON; missing fields take built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run every trial against this instance file instead of per-trial
    /// synthetic pools.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    skills: Option<usize>,
    /// Edge probability of the social graph.
    #[arg(long)]
    p: Option<f64>,
    /// Number of required skills per project.
    #[arg(long)]
    required: Option<usize>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long, value_enum)]
    fallback: Option<FallbackArg>,
    /// Which count the exploration threshold is keyed to.
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    /// Explicit exploration length (default: the 1/e rule).
    #[arg(long)]
    k: Option<u64>,
    /// Cap on worker threads; 1 forces a serial run with identical output.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    overrides: ExperimentOverrides,
    /// Output CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: ExperimentOverrides,
    /// Comma-separated exploration lengths to sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    k_values: Vec<u64>,
    /// Output CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RanksArgs {
    /// Number of candidates in the abstract pool.
    #[arg(long)]
    n: usize,
    /// Exploration lengths, one output row each.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u64>,
    #[arg(long, default_value_t = 100_000)]
    shuffles: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV produced by bench, sweep, or ranks.
    #[arg(long)]
    input: PathBuf,
    /// Output SVG path.
    #[arg(short, long)]
    output: PathBuf,
    /// Metric to chart for sweep CSVs.
    #[arg(long, default_value = "te_total")]
    metric: String,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ranks(args) => cmd_ranks(args),
        Command::Plot(args) => plot::cmd_plot(&args.input, &args.output, &args.metric),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|v| v.parse().ok())
}

/// Flags win, then $CROWDTEAM_SEED, then the built-in default.
fn resolve_seed(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(env_seed).unwrap_or(default)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let params = GenParams {
        n_workers: args.workers,
        n_skills: args.skills,
        edge_probability: args.p,
        seed: resolve_seed(args.seed, 0),
    };
    let instance = Instance::generate(&params)?;
    write_file(&args.output, &instance.to_json())?;
    println!(
        "wrote {} ({} workers, {} skills, seed {})",
        args.output.display(),
        params.n_workers,
        params.n_skills,
        params.seed
    );
    Ok(())
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("invalid instance file {}", path.display()))
}

fn load_project(path: &Path, instance: &Instance) -> Result<ProjectSpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let project: ProjectSpec = serde_json::from_str(&text)
        .with_context(|| format!("invalid project file {}", path.display()))?;
    project.validate(instance.n_skills())?;
    Ok(project)
}

/// Serializable mirror of [`SolverReport`] for `--report-json`.
#[derive(Serialize)]
struct ReportJson<'a> {
    solver: &'a str,
    leader: usize,
    assignment: Vec<(usize, usize)>,
    te_total: f64,
    skill_term: f64,
    uncertainty_term: f64,
    cost_term: f64,
    social_term: f64,
    evaluations: u64,
    wall_time_us: u128,
    rank: Option<u64>,
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let project = load_project(&args.project, &instance)?;
    let model = PerceptionModel {
        sigma0: args.sigma0,
        ..Default::default()
    };
    let noise_seed = resolve_seed(args.noise_seed, 0);
    let stream_seed = resolve_seed(args.stream_seed, 1);

    let total = configuration_count(
        instance.n_workers(),
        project.team_size(),
        CountMode::Distinct,
    )? as u64;
    let (name, report) = match args.solver {
        SolverKind::Exhaustive => (
            "exhaustive",
            exhaustive_solver(&instance, &project, &model, noise_seed)?,
        ),
        SolverKind::Secretary => {
            let k = match args.k {
                Some(k) => exploration_threshold(total, ExplorationRule::Explicit(k))?,
                None => exploration_threshold(total, ExplorationRule::OneOverE)?,
            };
            (
                "secretary",
                secretary_solver(
                    &instance,
                    &project,
                    &model,
                    noise_seed,
                    stream_seed,
                    k,
                    args.fallback.into(),
                )?,
            )
        }
    };

    print!("{}", format_report(name, &report, total));
    if let Some(path) = &args.report_json {
        let json = ReportJson {
            solver: name,
            leader: report.chosen.leader,
            assignment: report.chosen.assignment().to_vec(),
            te_total: report.total_te,
            skill_term: report.breakdown.skill_term,
            uncertainty_term: report.breakdown.uncertainty_term,
            cost_term: report.breakdown.cost_term,
            social_term: report.breakdown.social_term,
            evaluations: report.evaluations,
            wall_time_us: report.wall_time.as_micros(),
            rank: report.rank,
        };
        write_file(path, &serde_json::to_string_pretty(&json)?)?;
    }
    Ok(())
}

fn format_report(name: &str, report: &SolverReport, total: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "solver:       {name}");
    let _ = writeln!(out, "leader:       {}", report.chosen.leader);
    for (skill, worker) in report.chosen.assignment() {
        let _ = writeln!(out, "  skill {skill} -> worker {worker}");
    }
    let _ = writeln!(out, "te_total:     {:.6}", report.total_te);
    let _ = writeln!(out, "  skill        {:.6}", report.breakdown.skill_term);
    let _ = writeln!(
        out,
        "  uncertainty  {:.6}",
        report.breakdown.uncertainty_term
    );
    let _ = writeln!(out, "  cost         {:.6}", report.breakdown.cost_term);
    let _ = writeln!(out, "  social       {:.6}", report.breakdown.social_term);
    let _ = writeln!(out, "evaluations:  {} of {total}", report.evaluations);
    let _ = writeln!(out, "wall_time:    {:?}", report.wall_time);
    if let Some(rank) = report.rank {
        let _ = writeln!(out, "rank:         {rank}");
    }
    out
}

/// Loads the experiment config with precedence: flags, then the config
/// file, then $CROWDTEAM_SEED for the base seed, then built-in defaults.
/// Returns the fixed instance too when `--instance` was given; its
/// dimensions replace the generation parameters.
fn resolve_experiment(
    overrides: &ExperimentOverrides,
) -> Result<(ExperimentParams, Option<Instance>)> {
    let raw: serde_json::Value = match &overrides.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("invalid experiment config {}", path.display()))?
        }
        None => serde_json::json!({}),
    };
    let config_sets_seed = raw.get("base_seed").is_some();
    let mut params: ExperimentParams =
        serde_json::from_value(raw).context("experiment config does not match the schema")?;

    if let Some(n) = overrides.trials {
        params.n_trials = n;
    }
    if let Some(seed) = overrides.base_seed {
        params.base_seed = seed;
    } else if !config_sets_seed {
        if let Some(seed) = env_seed() {
            params.base_seed = seed;
        }
    }
    if let Some(n) = overrides.workers {
        params.gen.n_workers = n;
    }
    if let Some(m) = overrides.skills {
        params.gen.n_skills = m;
    }
    if let Some(p) = overrides.p {
        params.gen.edge_probability = p;
    }
    if let Some(r) = overrides.required {
        params.project.n_required_skills = Some(r);
    }
    if let Some(s) = overrides.sigma0 {
        params.perception.sigma0 = s;
    }
    if let Some(f) = overrides.fallback {
        params.fallback = f.into();
    }
    if let Some(s) = overrides.space {
        params.space = s.into();
    }
    if let Some(k) = overrides.k {
        params.k = KSpec::Explicit(k);
    }
    let fixed_instance = match &overrides.instance {
        Some(path) => {
            let instance = load_instance(path)?;
            params.gen.n_workers = instance.n_workers();
            params.gen.n_skills = instance.n_skills();
            Some(instance)
        }
        None => None,
    };
    params.validate()?;
    Ok((params, fixed_instance))
}

/// Runs `f` under a thread pool capped at `jobs` workers. Results do not
/// depend on the cap; only elapsed time does.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("cannot build worker pool")?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn bench_csv(trials: &[TrialMetrics]) -> String {
    let mut out = String::from(
        "trial,solver,te_total,skill_perceived,skill_true,uncertainty,cost,social,evaluations,wall_time_us,rank\n",
    );
    for trial in trials {
        for (solver, side) in [
            (SOLVER_EXHAUSTIVE, &trial.exhaustive),
            (SOLVER_SECRETARY, &trial.secretary),
        ] {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                trial.trial,
                solver,
                side.te_total,
                side.skill_perceived,
                side.skill_true,
                side.uncertainty,
                side.cost,
                side.social,
                side.evaluations,
                side.wall_time_us,
                side.rank
            );
        }
    }
    out
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let (params, fixed) = resolve_experiment(&args.overrides)?;
    let report: MonteCarloReport = with_jobs(args.overrides.jobs, || {
        monte_carlo_on(&params, fixed.as_ref())
    })??;
    write_file(&args.output, &bench_csv(&report.trials))?;

    let mean = |solver: &str, metric: &str| report.summary.get(solver, metric).unwrap().mean;
    println!(
        "wrote {} ({} trials); mean TE exhaustive {:.4} vs secretary {:.4}; \
         mean evaluations {:.0} vs {:.0}",
        args.output.display(),
        params.n_trials,
        mean(SOLVER_EXHAUSTIVE, "te_total"),
        mean(SOLVER_SECRETARY, "te_total"),
        mean(SOLVER_EXHAUSTIVE, "evaluations"),
        mean(SOLVER_SECRETARY, "evaluations"),
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.k_values.is_empty() {
        bail!("sweep needs at least one k value");
    }
    let (params, fixed) = resolve_experiment(&args.overrides)?;
    let points = with_jobs(args.overrides.jobs, || {
        k_sweep_on(&params, &args.k_values, fixed.as_ref())
    })??;

    let mut out = String::from("k,solver,metric,mean,std,ci95,n\n");
    for point in &points {
        for solver in &point.summary.solvers {
            for stats in &solver.metrics {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    point.k,
                    solver.solver,
                    stats.metric,
                    stats.mean,
                    stats.std_dev,
                    stats.ci95_half_width,
                    stats.n
                );
            }
        }
    }
    write_file(&args.output, &out)?;
    println!(
        "wrote {} ({} sweep points x {} trials)",
        args.output.display(),
        points.len(),
        params.n_trials
    );
    Ok(())
}

fn cmd_ranks(args: RanksArgs) -> Result<()> {
    let seed = resolve_seed(args.seed, 0);
    let mut out =
        String::from("n,k,p_rank1,p_rank2_or_better,p_full_scan,mean_evaluations,n_shuffles\n");
    for &k in &args.k {
        let stats = rank_statistics(args.n, k, args.shuffles, seed)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            stats.n_candidates,
            stats.k,
            stats.p_rank1,
            stats.p_rank2_or_better,
            stats.p_full_scan,
            stats.mean_evaluations,
            stats.n_shuffles
        );
    }
    write_file(&args.output, &out)?;
    println!(
        "wrote {} ({} rows, {} shuffles each)",
        args.output.display(),
        args.k.len(),
        args.shuffles
    );
    Ok(())
}
