//! `conmezo`: runs, grids, the analysis verification suite, the timing bench
//! and the synthetic-quadratic reproduction preset.
//!
//! Exit codes: 0 success, 1 a run or verification failed, 2 usage or
//! configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conmezo::analysis::{run_suite, SuiteGrid};
use conmezo::{Direction, MemoryStrategy, Method};
use conmezo_harness::output::{trajectory_path, write_json, write_trajectory};
use conmezo_harness::{
    bench_step_time, keys_help, reproduce_fig2, run_grid, run_seeds, BenchSpec, ExperimentConfig, Fig2Config,
    HarnessError, RunSummary,
};

const OUTPUT_ENV: &str = "CONMEZO_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "conmezo", version, about = "Cone-sampled momentum zeroth-order optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over its seeds and write trajectories.
    #[command(after_help = keys_help())]
    Run(ExperimentArgs),
    /// Run every cell of a hyperparameter grid and select the best.
    #[command(after_help = keys_help())]
    Grid(ExperimentArgs),
    /// Monte-Carlo checks of the estimator moments, concentration and descent.
    Verify(VerifyArgs),
    /// Median wall time of one optimizer step on a constant objective.
    Bench(BenchArgs),
    /// Tune MeZO and ConMeZO on the d=1000 quadratic, rerun the winners at
    /// the long horizon and report the speedup.
    #[command(name = "reproduce-fig2")]
    ReproduceFig2(Fig2Args),
}

#[derive(Args)]
struct Common {
    /// Output root [env: CONMEZO_OUTPUT_DIR; ranks below the config file's output_dir].
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Parallel runs.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides as key=value; commas separate pairs outside brackets. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE,...")]
    set: Vec<String>,
    #[arg(long)]
    optimizer: Option<Method>,
    /// For example quadratic:d=1000 or sphere:d=10,x0_norm=1.
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated run seeds.
    #[arg(long, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Module {
    Analysis,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "analysis")]
    module: Module,
    /// small takes seconds; full runs every grid at full sample counts.
    #[arg(long, default_value = "small")]
    grid: SuiteGrid,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "conmezo")]
    optimizer: Method,
    #[arg(long, value_enum, default_value = "buffered")]
    memory: MemoryArg,
    #[arg(long, value_enum, default_value = "unit-sphere")]
    dist: DistArg,
    #[arg(short, long, default_value_t = 10_000_000)]
    d: usize,
    /// Timed steps.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 5)]
    warmup_steps: usize,
    #[arg(long, default_value_t = 1.35)]
    theta: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryArg {
    SeedReplay,
    Buffered,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    UnitSphere,
    Gaussian,
}

#[derive(Args)]
struct Fig2Args {
    /// Seeds 0..N.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 10_000)]
    tuning_steps: u64,
    #[arg(long, default_value_t = 100_000)]
    final_steps: u64,
    /// Logging interval of the long runs.
    #[arg(long, default_value_t = 10)]
    log_every: u64,
    /// Also tune and run MeZO+Momentum.
    #[arg(long)]
    momentum: bool,
    #[command(flatten)]
    common: Common,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Failure categories mapped to exit codes.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Run(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
        Command::Verify(args) => verify(args),
        Command::Bench(args) => bench(args),
        Command::ReproduceFig2(args) => fig2(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Precedence, lowest first: built-in defaults, the environment's output
/// directory, the config file, `--set`, dedicated flags.
fn resolve(args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::var_os(OUTPUT_ENV) {
        cfg.output_dir = dir.into();
    }
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    for set in &args.set {
        cfg.apply_overrides(set)?;
    }
    if let Some(m) = args.optimizer {
        cfg.optimizer = m;
    }
    if let Some(p) = &args.problem {
        cfg.problem = p.parse()?;
    }
    if let Some(seeds) = &args.seed_list {
        cfg.seeds = seeds.clone();
    }
    if let Some(dir) = &args.common.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_root(common: &Common) -> PathBuf {
    common
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| ExperimentConfig::default().output_dir)
}

fn run(args: ExperimentArgs) -> Outcome {
    let cfg = resolve(&args)?;
    let cells = cfg.cells();
    let [cell] = cells[..] else {
        return Err(Failure::Usage(format!("configuration spans {} grid cells; use `grid`", cells.len())));
    };
    let dir = cfg.experiment_dir();
    write_json(&dir.join("config.json"), &cfg)?;
    let outputs = run_seeds(&cfg, &cell, args.common.workers)?;
    let id = cell.id(cfg.optimizer);
    let mut summaries: Vec<RunSummary> = Vec::new();
    for out in outputs {
        write_trajectory(&trajectory_path(&dir, &id, out.summary.seed), &out.trajectory)?;
        let s = &out.summary;
        println!(
            "seed={} steps={} final={:.6e} best={:.6e} evals={} diverged={} wall_ms={:.1}",
            s.seed,
            s.steps,
            s.final_objective,
            s.best_objective,
            s.evals,
            s.diverged,
            s.total_wall_ns as f64 / 1e6
        );
        summaries.push(out.summary);
    }
    write_json(&dir.join("summary.json"), &summaries)?;
    println!("wrote {}", dir.display());
    if summaries.iter().any(|s| s.diverged) {
        return Err(Failure::Run("at least one seed diverged".into()));
    }
    Ok(())
}

fn grid(args: ExperimentArgs) -> Outcome {
    let cfg = resolve(&args)?;
    let dir = cfg.experiment_dir();
    let result = run_grid(&cfg, args.common.workers)?;
    result.save(&dir)?;
    for c in &result.report.cells {
        println!(
            "{}cell {} mean_final={:.6e} std={:.3e} diverged_seeds={:?}",
            if c.selected { "* " } else { "  " },
            c.id,
            c.mean_final,
            c.std_final,
            c.diverged_seeds
        );
    }
    println!("selected {}", result.report.best().id);
    println!("wrote {}", dir.display());
    Ok(())
}

fn verify(args: VerifyArgs) -> Outcome {
    let Module::Analysis = args.module;
    let checks = run_suite(args.grid, args.seed);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    let dir = output_root(&args.common).join("verify");
    let echo = serde_json::json!({ "module": "analysis", "grid": args.grid, "seed": args.seed });
    write_json(&dir.join("config.json"), &echo)?;
    write_json(&dir.join("checks.json"), &checks)?;
    if failed > 0 {
        return Err(Failure::Run(format!("{failed} verification checks failed")));
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Outcome {
    let memory = match args.memory {
        MemoryArg::SeedReplay => MemoryStrategy::SeedReplay,
        MemoryArg::Buffered => MemoryStrategy::Buffered,
    };
    let mut spec = BenchSpec::new(args.optimizer, args.d, memory);
    spec.dist = match args.dist {
        DistArg::UnitSphere => Direction::UnitSphere,
        DistArg::Gaussian => Direction::Gaussian,
    };
    spec.n_steps = args.steps;
    spec.warmup_steps = args.warmup_steps;
    spec.theta = args.theta;
    let r = bench_step_time(&spec)?;
    println!(
        "{} d={} memory={:?} dist={:?} passes={} median_ms={:.3} mean_ms={:.3} min_ms={:.3}",
        spec.method,
        spec.d,
        spec.memory,
        spec.dist,
        r.regenerations,
        r.median_ns / 1e6,
        r.mean_ns / 1e6,
        r.min_ns as f64 / 1e6
    );
    let path = output_root(&args.common).join("bench").join(format!("{}-{:?}-d{}.json", spec.method, spec.memory, spec.d));
    write_json(&path, &r)?;
    Ok(())
}

fn fig2(args: Fig2Args) -> Outcome {
    if args.seeds == 0 || args.tuning_steps == 0 || args.final_steps == 0 || args.log_every == 0 {
        return Err(Failure::Usage("--seeds, --tuning-steps, --final-steps and --log-every must be positive".into()));
    }
    let cfg = Fig2Config {
        seeds: (0..args.seeds).collect(),
        tuning_steps: args.tuning_steps,
        final_steps: args.final_steps,
        tuning_log_every: (args.tuning_steps / 10).max(1),
        final_log_every: args.log_every,
        include_momentum: args.momentum,
        ..Fig2Config::default()
    };
    let dir = output_root(&args.common).join("fig2");
    write_json(&dir.join("config.json"), &cfg)?;
    let report = reproduce_fig2(&cfg, args.common.workers, Some(&dir), |line| println!("{line}"))?;
    if let Some(m) = &report.momentum {
        println!("mezo_momentum final mean {:.6e} ({})", m.final_mean, m.tuning.best().id);
    }
    let s = &report.speedup;
    match s.ratio {
        Some(r) => println!("speedup={r:.4} crossing_step={} horizon={}", s.crossing_step.unwrap_or(0), s.horizon),
        None => println!("speedup=undefined (ConMeZO never reached MeZO's final objective {:.6e})", s.target),
    }
    println!("wrote {}", dir.display());
    if s.ratio.is_none() {
        return Err(Failure::Run("speedup undefined".into()));
    }
    Ok(())
}
