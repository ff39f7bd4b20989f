//! `vamrate`: simulate the iteration, build rate certificates and check
//! them against the simulated residuals.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;
use vamrate_core::iteration::IterationError;
use vamrate_core::operators::OperatorError;
use vamrate_core::rates::RateError;
use vamrate_core::verify::VerifyError;

use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<IterationError> for CliError {
    fn from(e: IterationError) -> Self {
        match e {
            IterationError::Schedule(_) => CliError::Config(e.to_string()),
            IterationError::Io(e) => CliError::Io(e),
            IterationError::Csv(e) => CliError::Csv(e),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::MissingModulus(_) => CliError::Config(e.to_string()),
            RateError::Precondition { .. } => CliError::Verification(e.to_string()),
            RateError::Iteration(e) => e.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Rate(e) => e.into(),
            VerifyError::Csv(e) => CliError::Csv(e),
            VerifyError::Io(e) => CliError::Io(e),
            VerifyError::Mismatch(_) => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "vamrate", version, about = "Rates of asymptotic regularity for the viscosity iteration with errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    config: PathBuf,
    /// Overrides `run.output_dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Runs once per seed, concurrently, into `<output-dir>/seed-<s>`.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write `trace.csv`.
    Run(RunArgs),
    /// Build every applicable certificate and write its table and provenance.
    Certify(RunArgs),
    /// Simulate, certify and check; exits with 1 on any fail row.
    Verify(RunArgs),
    /// Merge the verification reports found below a directory.
    Report {
        dir: PathBuf,
    },
}

/// One `(config, output directory)` pair per requested seed.
fn jobs(args: &RunArgs) -> Result<Vec<(ExperimentConfig, PathBuf)>, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    let base = args
        .output_dir
        .clone()
        .or_else(|| cfg.run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("vamrate-out"));
    if args.seeds.is_empty() {
        return Ok(vec![(cfg, base)]);
    }
    Ok(args
        .seeds
        .iter()
        .map(|&s| {
            let mut c = cfg.clone();
            c.run.seed = s;
            (c, base.join(format!("seed-{s}")))
        })
        .collect())
}

fn for_each_job<T: Send>(
    args: &RunArgs,
    f: impl Fn(&ExperimentConfig, &Path) -> Result<T, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    jobs(args)?.par_iter().map(|(cfg, out)| f(cfg, out)).collect()
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => for_each_job(&args, |c, o| commands::run(c, o).map(drop)).map(drop),
        Command::Certify(args) => for_each_job(&args, |c, o| commands::certify_cmd(c, o).map(drop)).map(drop),
        Command::Verify(args) => {
            let outcomes = for_each_job(&args, commands::verify_cmd)?;
            let fails: usize = outcomes.iter().flat_map(|o| &o.reports).map(|r| r.failed()).sum();
            let violations: usize = outcomes.iter().map(|o| o.violations.len()).sum();
            if fails + violations > 0 {
                return Err(CliError::Verification(format!(
                    "{fails} fail rows, {violations} precondition violations"
                )));
            }
            Ok(())
        }
        Command::Report { dir } => match commands::report_cmd(&dir)? {
            0 => Ok(()),
            n => Err(CliError::Verification(format!("{n} fail rows"))),
        },
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
