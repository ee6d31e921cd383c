//! `pseudoanalytic`: evaluate formal powers and Cauchy kernels on grids, build
//! generating sequences and run the invariant suite.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 numerical error.

mod error;
mod formal_power;
mod job;
mod kernel_grid;
mod output;
mod sequence;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::job::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "pseudoanalytic", version, about)]
struct Cli {
    /// Pass threshold for closed-form comparisons and verification checks,
    /// replacing each check's own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true, default_value_t = 8)]
    quad_order: usize,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Finite-difference step for derivative checks (default `1e-5·(1 + |x|)`).
    #[arg(long, global = true)]
    h: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    FormalPower(formal_power::Opts),
    KernelGrid(kernel_grid::Opts),
    Verify(verify::Opts),
    Sequence(sequence::Opts),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tolerances { tol: cli.tol, quad_order: cli.quad_order, quad_tol: cli.quad_tol, h: cli.h };
    let result = tol.validate().and_then(|()| match cli.command {
        Command::FormalPower(o) => formal_power::run(o, tol),
        Command::KernelGrid(o) => kernel_grid::run(o, tol),
        Command::Verify(o) => verify::run(o, tol),
        Command::Sequence(o) => sequence::run(o, tol),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
