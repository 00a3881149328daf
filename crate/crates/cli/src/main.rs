//! `minreach`: choose few actuated states for a state transfer or a target set.
//!
//! Exit codes: 0 success, 2 input or capacity error, 3 numerically infeasible
//! transfer, 4 oracle found nothing within `--kmax`, 5 reduction check failed.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    OracleNone(String),
    #[error("{0}")]
    VerificationFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::OracleNone(_) => 4,
            CliError::VerificationFailed(_) => 5,
        }
    }
}

impl From<minreach::Error> for CliError {
    fn from(e: minreach::Error) -> Self {
        match e {
            minreach::Error::NumericallyInfeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "minreach", version, about = "Sparse actuator selection for LTI reachability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TransferArgs {
    /// Initial state: comma-separated reals or @file (default: zero).
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Final state: comma-separated reals or @file.
    #[arg(long, allow_hyphen_values = true)]
    x1: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t1: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select actuators for x0 -> x1 (greedy with --eps, or exact by bisection).
    Reach {
        system: PathBuf,
        #[command(flatten)]
        transfer: TransferArgs,
        /// Close-feasibility level for a single greedy run.
        #[arg(long, conflicts_with = "exact", required_unless_present = "exact")]
        eps: Option<f64>,
        /// Bisect the level until the transfer is exactly feasible.
        #[arg(long)]
        exact: bool,
        /// Bracket width at which the bisection stops.
        #[arg(long, default_value_t = 1e-3, requires = "exact")]
        accuracy: f64,
        /// Write the per-pick trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Reach the sparsest of a union of balls.
    SubsetReach {
        system: PathBuf,
        balls: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exhaustive search for a minimum actuator set.
    Oracle {
        system: PathBuf,
        #[command(flatten)]
        transfer: TransferArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        kmax: usize,
    },
    /// Write a generated system file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Build the system and target of a hitting-set reduction.
    Reduce {
        instance: PathBuf,
        variant: String,
        #[arg(long)]
        out: PathBuf,
        /// Target file (default: the --out path with a .target.json suffix).
        #[arg(long)]
        target_out: Option<PathBuf>,
    },
    /// Check a reduction's equivalence on an instance by brute force.
    Verify {
        instance: PathBuf,
        variant: String,
        #[arg(long)]
        kmax: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Star network with N leaves.
    Star {
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted Erdős–Rényi digraph on N nodes.
    Er {
        n: usize,
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reach {
            system,
            transfer,
            eps,
            exact,
            accuracy,
            trace,
        } => {
            let mode = if exact {
                commands::ReachMode::Exact { accuracy }
            } else {
                commands::ReachMode::Eps(eps.expect("clap enforces --eps or --exact"))
            };
            commands::reach(&system, &transfer.into(), mode, trace.as_deref())
        }
        Command::SubsetReach {
            system,
            balls,
            trace,
        } => commands::subset_reach(&system, &balls, trace.as_deref()),
        Command::Oracle {
            system,
            transfer,
            eps,
            kmax,
        } => commands::oracle(&system, &transfer.into(), eps, kmax),
        Command::Gen { kind } => match kind {
            GenKind::Star { n, out } => commands::gen_star(n, &out),
            GenKind::Er { n, seed, out } => commands::gen_er(n, seed, &out),
        },
        Command::Reduce {
            instance,
            variant,
            out,
            target_out,
        } => commands::reduce(&instance, &variant, &out, target_out.as_deref()),
        Command::Verify {
            instance,
            variant,
            kmax,
        } => commands::verify(&instance, &variant, kmax),
    }
}

impl From<TransferArgs> for commands::TransferInput {
    fn from(t: TransferArgs) -> Self {
        Self {
            x0: t.x0,
            x1: t.x1,
            t0: t.t0,
            t1: t.t1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
