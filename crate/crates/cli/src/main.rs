//! `seirs-control`: solve, compare and sweep epidemic control scenarios.
//!
//! Exit codes: 0 on success, 1 on usage/config/IO errors, 2 when a solve ran
//! but did not converge.

mod commands;
mod output;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::SolverOverrides;

#[derive(Parser)]
#[command(
    name = "seirs-control",
    about = "Optimal treatment and vaccination schedules for a seasonally forced SEIRS model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario; writes t,S,E,I,R,p1..p4,T,V per grid node.
    Solve(RunArgs),
    /// Solve with and without controls; writes both state sets side by side.
    Compare(RunArgs),
    /// Re-solve across a parameter lattice; writes one CSV per member plus
    /// an index.csv summary.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (TOML). Omit for the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
    /// Number of grid steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Relative convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Control-update blend factor in [0, 1).
    #[arg(long)]
    damping: Option<f64>,
    /// Forcing amplitude override in [0, 1).
    #[arg(long)]
    per: Option<f64>,
}

impl RunArgs {
    fn overrides(&self) -> SolverOverrides {
        SolverOverrides {
            steps: self.steps,
            tolerance: self.tol,
            max_iterations: self.max_iter,
            damping: self.damping,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Parameter to sweep: mu, gamma, epsilon or eta.
    #[arg(long)]
    param: String,
    /// First lattice value.
    #[arg(long)]
    from: f64,
    /// Last lattice value.
    #[arg(long)]
    to: f64,
    /// Lattice spacing.
    #[arg(long)]
    step: f64,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return 0;
            }
            let _ = err.print();
            return 1;
        }
    };

    let outcome = match &cli.command {
        Command::Solve(args) => commands::cmd_solve(
            args.config.as_deref(),
            &args.out,
            &args.overrides(),
            args.per,
        ),
        Command::Compare(args) => commands::cmd_compare(
            args.config.as_deref(),
            &args.out,
            &args.overrides(),
            args.per,
        ),
        Command::Sweep(args) => commands::cmd_sweep(
            args.run.config.as_deref(),
            &args.run.out,
            &args.run.overrides(),
            args.run.per,
            &args.param,
            args.from,
            args.to,
            args.step,
        ),
    };

    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}
