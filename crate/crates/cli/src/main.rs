//! `baskakov`: moment tables, invariant suites and convergence studies for the
//! complex Baskakov–Szász–Durrmeyer operators.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage or hypothesis error.

// `!(x < y)` is deliberate: NaN parameters must fail hypothesis checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod grid;

use std::process::ExitCode;

use baskakov_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::ExperimentArgs;

/// Thread-count override for the worker pool.
pub const THREADS_ENV: &str = "BASKAKOV_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or a violated hypothesis; exit code 2.
    Usage(String),
    /// Failure while computing; exit code 1.
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Hypothesis { .. }
            | Error::Divergence { .. }
            | Error::InvalidArgument(_)
            | Error::Domain { .. }
            | Error::EnvelopeViolation { .. }
            | Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "baskakov",
    version,
    about = "Complex Baskakov-Szász-Durrmeyer operator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the moment polynomials T_{n,0..K}.
    Moments(MomentsArgs),
    /// Run an invariant suite and report each case.
    Verify(VerifyArgs),
    /// Error table ‖L*_n f − f‖_r over a grid of n, with order fit and bound verdict.
    Converge(ExperimentArgs),
    /// Voronovskaja residuals against the second-order constant.
    Voronovskaja(ExperimentArgs),
    /// Errors of the p-th derivative against the derivative bound.
    Derivative(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentFormat {
    Exact,
    Dec,
    Json,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long = "K", alias = "k")]
    pub k: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub format: MomentFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    LemmaBound,
    Remainder,
    BasisIdentity,
    Oracle,
    TailInequality,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    /// Override the n grid (v grid for basis-identity uses --k).
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    /// Comma-separated radii.
    #[arg(long)]
    pub r: Option<String>,
    /// Comma-separated ρ values for tail-inequality.
    #[arg(long)]
    pub rho: Option<String>,
    /// Print only failing cases and the summary.
    #[arg(long)]
    pub failures_only: bool,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Moments(args) => commands::moments(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Converge(args) => commands::converge(&args.resolve()?),
        Command::Voronovskaja(args) => commands::voronovskaja(&args.resolve()?),
        Command::Derivative(args) => commands::derivative(&args.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
