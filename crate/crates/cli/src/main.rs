//! `sst`: command-line front end for exact moments, transfer theorems,
//! singularity analysis, limit laws, simulation and verification.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(sst_core::SstError),
    Io(String),
    Verification(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Verification(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl From<sst_core::SstError> for CliError {
    fn from(e: sst_core::SstError) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sst", version, about = "Additive functionals on random search trees")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Working precision in bits (>= 64).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random seed; drawn from entropy and printed to stderr when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Parallel workers for sampling.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Series truncation for constants.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Roots of the indicial polynomial.
    Roots(commands::RootsArgs),
    /// Exact moments from the recurrences.
    Moments(commands::MomentsArgs),
    /// Monte Carlo sampling with an empirical moment report.
    Simulate(commands::SimulateArgs),
    /// Exact or asymptotic transfer of tolls to means.
    Transfer(commands::TransferArgs),
    /// Hadamard product of two power singularities.
    Hadamard(commands::HadamardArgs),
    /// Moment sequences of limit laws.
    Limit(commands::LimitArgs),
    /// Named constants with truncation bounds.
    Constants(commands::ConstantsArgs),
    /// Run the cross-validation matrix.
    Verify(commands::VerifyArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let flags = Overrides {
        precision: g.precision,
        tol: g.tol,
        seed: g.seed,
        workers: g.workers,
        format: g.format,
        output: g.output,
        terms: g.terms,
    };
    let cfg = RunConfig::resolve(flags, g.config.as_deref())?;
    sst_core::num::mpf::set_precision(cfg.precision);
    commands::dispatch(cli.command, cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
