//! Batch front end: configuration parsing, command dispatch and CSV/JSON
//! emission for the δ-interaction Schrödinger solver.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// invalid configuration or input (exit 2)
    Config(String),
    /// identity suite failed (exit 1)
    Verification,
}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }
}

impl From<deltasolve_core::SolverError> for CliError {
    fn from(e: deltasolve_core::SolverError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "deltasolve", version, about = "1-D Schrödinger solver with δ-interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// configuration file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// output path; overrides `output.path` from the config (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// solution backend
    #[arg(long, default_value = "propagation")]
    backend: String,
    /// RNG seed; overrides `numerics.seed`
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate c, s, e, psi, theta solutions on the grid
    Solve(CommonArgs),
    /// Real-eigenvalue search for a Sturm-Liouville problem
    Spectrum(CommonArgs),
    /// Export the exact q ≡ 0 transmutation kernel K(x, t)
    Kernel(CommonArgs),
    /// Export Fourier-Legendre coefficients a_n(x)
    Coeffs(CommonArgs),
    /// Run the identity suite and emit a JSON report
    Verify(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args): (&str, &CommonArgs) = match &cli.command {
        Command::Solve(a) => ("solve", a),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Kernel(a) => ("kernel", a),
        Command::Coeffs(a) => ("coeffs", a),
        Command::Verify(a) => ("verify", a),
    };
    match commands::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
