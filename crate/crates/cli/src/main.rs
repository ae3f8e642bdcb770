//! `ncx`: robustness of contextuality proofs from the command line.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when the solver or
//! its certificate checks fail. `NCX_TOL` overrides the numerical tolerance.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncx_core::DEFAULT_TOL;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ncx", version, about = "Simplex embeddings and noise robustness of GPT fragments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Least noise weight that makes a scenario noncontextual.
    Robustness(commands::RobustnessArgs),
    /// Robustness over a parameter grid, as CSV.
    Sweep(commands::SweepArgs),
    /// Facet inequalities of the state or effect cone, as CSV.
    Facets(commands::FacetsArgs),
    /// Full embedding result as JSON.
    Embed(commands::EmbedArgs),
    /// The 3x4 data table of an MESD scenario, as CSV.
    Table(commands::TableArgs),
    /// Closed-form values.
    Oracle(commands::OracleArgs),
    /// A noncontextual model as JSON.
    Model(commands::ModelArgs),
    /// The fragment of a scenario as JSON.
    Fragment(commands::FragmentArgs),
}

/// Below this, rank decisions are dominated by rounding.
const MIN_TOL: f64 = 1e-15;

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("NCX_TOL") {
        Ok(s) => {
            let t: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::user(format!("NCX_TOL='{s}' is not a number")))?;
            if !(t.is_finite() && t >= MIN_TOL) {
                return Err(CliError::user(format!("NCX_TOL must be at least {MIN_TOL:e}, got {s}")));
            }
            Ok(t)
        }
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = tolerance()?;
    match &cli.command {
        Command::Robustness(a) => commands::robustness(a, tol),
        Command::Sweep(a) => commands::sweep(a, tol),
        Command::Facets(a) => commands::facets(a, tol),
        Command::Embed(a) => commands::embed(a, tol),
        Command::Table(a) => commands::table(a, tol),
        Command::Oracle(a) => commands::oracle(a),
        Command::Model(a) => commands::model(a, tol),
        Command::Fragment(a) => commands::fragment(a, tol),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
