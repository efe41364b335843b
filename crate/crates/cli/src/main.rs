//! `consensus`: consensus-set inference on two samples, and lognormal
//! coverage simulations.
//!
//! Exit codes: 0 on success, 2 on usage, configuration, parse or domain errors.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use consensus_core::analysis::{analyze, AnalysisSettings};
use consensus_core::io::{read_sample, result_rows, summary_text, write_draws_csv, write_results_csv, CoverageCsvWriter};
use consensus_core::plot::region_svg;
use consensus_core::simulation::{run_coverage_experiment_with, ExperimentConfig};
use consensus_core::{build_grid, Execution, SamplePair, SetMode, WeightScheme};
use serde::Deserialize;

/// Environment variable that overrides `--seed`.
const SEED_ENV: &str = "CONSENSUS_SEED";

#[derive(Parser)]
#[command(name = "consensus", version, about = "Confidence sets for the utility functions under which sample A beats sample B")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze two samples: per-point results CSV, summary and region plot.
    Analyze(AnalyzeArgs),
    /// Run a lognormal coverage experiment from a TOML config.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sample_a: Option<PathBuf>,
    #[arg(long)]
    sample_b: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta_max: Option<f64>,
    #[arg(long)]
    theta_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s_max: Option<f64>,
    #[arg(long)]
    s_step: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Bootstrap replicates.
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; the CONSENSUS_SEED environment variable overrides it.
    #[arg(long)]
    seed: Option<u64>,
    /// multinomial or bayesian
    #[arg(long)]
    scheme: Option<WeightScheme>,
    /// one-sided or band-joint
    #[arg(long)]
    mode: Option<SetMode>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the bootstrap draw matrix to draws.csv.
    #[arg(long)]
    dump_draws: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config (TOML).
    config: PathBuf,
    /// Output CSV.
    #[arg(long, default_value = "coverage.csv")]
    out: PathBuf,
    #[arg(long)]
    sims: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

/// Analysis settings as read from a config file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeFile {
    sample_a: Option<PathBuf>,
    sample_b: Option<PathBuf>,
    theta_min: Option<f64>,
    theta_max: Option<f64>,
    theta_step: Option<f64>,
    s_min: Option<f64>,
    s_max: Option<f64>,
    s_step: Option<f64>,
    alpha: Option<f64>,
    reps: Option<usize>,
    seed: Option<u64>,
    scheme: Option<WeightScheme>,
    mode: Option<SetMode>,
    out: Option<PathBuf>,
    dump_draws: Option<bool>,
}

/// Resolved configuration for one `analyze` run.
#[derive(Debug)]
struct AnalysisConfig {
    sample_a: PathBuf,
    sample_b: PathBuf,
    settings: AnalysisSettings,
    out: PathBuf,
    dump_draws: bool,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn resolve(args: AnalyzeArgs) -> Result<AnalysisConfig, Failure> {
    let file: AnalyzeFile = match &args.config {
        Some(p) => read_toml(p)?,
        None => AnalyzeFile::default(),
    };
    let sample_a = args
        .sample_a
        .or(file.sample_a)
        .ok_or_else(|| Failure("--sample-a is required".into()))?;
    let sample_b = args
        .sample_b
        .or(file.sample_b)
        .ok_or_else(|| Failure("--sample-b is required".into()))?;
    let s_min = args.s_min.or(file.s_min).unwrap_or(-0.1);
    let grid = build_grid(
        args.theta_min.or(file.theta_min).unwrap_or(0.0),
        args.theta_max.or(file.theta_max).unwrap_or(3.0),
        args.theta_step.or(file.theta_step).unwrap_or(0.1),
        s_min,
        args.s_max.or(file.s_max).unwrap_or(s_min),
        args.s_step.or(file.s_step).unwrap_or(1.0),
    )?;
    let seed = match env_seed()? {
        Some(s) => s,
        None => args.seed.or(file.seed).unwrap_or(0),
    };
    let settings = AnalysisSettings {
        grid,
        alpha: args.alpha.or(file.alpha).unwrap_or(0.1),
        scheme: args.scheme.or(file.scheme).unwrap_or_default(),
        reps: args.reps.or(file.reps).unwrap_or(999),
        seed,
        mode: args.mode.or(file.mode).unwrap_or_default(),
        execution: Execution::Parallel,
    };
    settings.validate()?;
    Ok(AnalysisConfig {
        sample_a,
        sample_b,
        settings,
        out: args.out.or(file.out).unwrap_or_else(|| PathBuf::from("consensus-out")),
        dump_draws: args.dump_draws || file.dump_draws.unwrap_or(false),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn run_analysis(args: AnalyzeArgs) -> Result<(), Failure> {
    let cfg = resolve(args)?;
    let a = read_sample(&cfg.sample_a)?;
    let b = read_sample(&cfg.sample_b)?;
    let pair = SamplePair::new(a, b)?;
    let result = analyze(&pair, &cfg.settings)?;

    fs::create_dir_all(&cfg.out).map_err(|e| Failure(format!("{}: {e}", cfg.out.display())))?;
    let mut results = create(&cfg.out.join("results.csv"))?;
    write_results_csv(&result_rows(&result), &mut results)?;
    results.flush()?;

    let summary = summary_text(&result);
    fs::write(cfg.out.join("summary.txt"), &summary)?;

    let title = format!("Confidence sets, alpha = {}", cfg.settings.alpha);
    fs::write(
        cfg.out.join("region.svg"),
        region_svg(&result.grid, &result.sets.inner, &result.sets.outer, &title),
    )?;

    if cfg.dump_draws {
        let mut draws = create(&cfg.out.join("draws.csv"))?;
        write_draws_csv(&result.draws, &mut draws)?;
        draws.flush()?;
    }
    print!("{summary}");
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn run_simulation(args: SimulateArgs) -> Result<(), Failure> {
    let mut config: ExperimentConfig = read_toml(&args.config)?;
    if let Some(s) = args.sims {
        config.sims = s;
    }
    if let Some(r) = args.reps {
        config.reps = r;
    }
    if let Some(seed) = env_seed()?.or(args.seed) {
        config.seed = seed;
    }
    config.validate()?;
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut writer = CoverageCsvWriter::new(create(&args.out)?, &config)?;
    let total = config.rows.len();
    eprintln!(
        "running {total} rows x {} simulations x {} bootstrap draws",
        config.sims, config.reps
    );
    run_coverage_experiment_with(&config, execution, |i, row| {
        writer.write_row(row)?;
        eprintln!(
            "[{}/{total}] n_a={} n_b={} sigma_b={} mu_b={}: band {:.3}, both sets {:.3}",
            i + 1,
            row.design.n_a,
            row.design.n_b,
            row.design.sigma_b,
            row.design.mu_b,
            row.band_cp(),
            row.both_sets_cp()
        );
        Ok(())
    })?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => run_analysis(args),
        Command::Simulate(args) => run_simulation(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
