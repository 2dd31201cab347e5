//! `bridgelab` — deterministic experiment runner.
//!
//! Usage: `bridgelab <experiment> --config <path> [--out <path>]
//! [--format csv|json] [--seed N]`. Exit codes: 0 success, 1 invariant or
//! runtime failure, 2 configuration error, 3 solver non-convergence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bridgelab_cli::config::{self, Experiment, ExperimentConfig, OutputFormat};
use bridgelab_cli::experiments;
use bridgelab_cli::record::ExperimentRecord;
use bridgelab_cli::CliError;

#[derive(Parser)]
#[command(name = "bridgelab", version, about = "Numerical laboratory for unitary and bridge flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free packet evolution against the closed-form spreading law.
    Propagate(RunArgs),
    /// Gaussian-to-Gaussian bridge against the closed-form width profile.
    Bridge(RunArgs),
    /// Collapse bridge onto a narrow measured marginal.
    Collapse(RunArgs),
    /// Gauge-transformation sweep of invariants over alpha in [-3, 3].
    #[command(name = "nlgt-sweep")]
    NlgtSweep(RunArgs),
    /// Mixed-flow commutator estimates at halving step sizes.
    Curvature(RunArgs),
    /// Invariant suite over seeded random states; fails on any violation.
    Check(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a flat key=value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Write the table here instead of the config's output.path / stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> OutputFormat {
        match arg {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (experiment, args) = match &cli.command {
        Command::Propagate(args) => (Experiment::Propagate, args),
        Command::Bridge(args) => (Experiment::Bridge, args),
        Command::Collapse(args) => (Experiment::Collapse, args),
        Command::NlgtSweep(args) => (Experiment::NlgtSweep, args),
        Command::Curvature(args) => (Experiment::Curvature, args),
        Command::Check(args) => (Experiment::Check, args),
    };
    let config = load_config(experiment, args)?;

    let (record, hard_failures) = match experiment {
        Experiment::Propagate => (experiments::propagate::run(&config)?, 0),
        Experiment::Bridge => (experiments::bridge::run(&config)?, 0),
        Experiment::Collapse => (experiments::collapse::run(&config)?, 0),
        Experiment::NlgtSweep => (experiments::nlgt_sweep::run(&config)?, 0),
        Experiment::Curvature => (experiments::curvature::run(&config)?, 0),
        Experiment::Check => experiments::check::run(&config)?,
    };
    emit(&record, &config)?;
    if hard_failures > 0 {
        eprintln!("{hard_failures} invariant check(s) failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_config(experiment: Experiment, args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| config::ConfigError::Io(format!("{}: {e}", args.config.display())))?;
    let mut config = config::load(&text, experiment)?;
    if let Some(out) = &args.out {
        config.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        config.output.format = format.into();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Render fully in memory, then write in one shot: a failed experiment
/// never leaves a partial file behind.
fn emit(record: &ExperimentRecord, config: &ExperimentConfig) -> Result<(), CliError> {
    let rendered = record.render(config.output.format);
    match &config.output.path {
        Some(path) => fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}
