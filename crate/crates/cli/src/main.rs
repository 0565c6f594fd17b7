//! `quatkrylov`: quaternion Krylov solvers and TV restoration from the
//! command line.
//!
//! Exit codes: `0` when the solver converged (including an exact-solution
//! breakdown), `2` when it stopped without converging, `3` on input or
//! configuration errors.

mod bench;
mod common;
mod restore;
mod signal;
mod solve;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "quatkrylov",
    version,
    about = "Quaternion Krylov solvers and total-variation restoration",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a quaternion linear system from Matrix Market input.
    Solve(solve::SolveArgs),
    /// Identify a quaternion filter from a 3-D signal.
    FilterSignal(signal::FilterSignalArgs),
    /// Degrade (optionally) and restore a color image.
    RestoreImage(restore::RestoreArgs),
    /// Run a solver-comparison suite and emit a table.
    Bench(bench::BenchArgs),
    /// Run all comparison suites against built-in reference values.
    Reproduce(bench::ReproduceArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve::run(args),
        Command::FilterSignal(args) => signal::run(args),
        Command::RestoreImage(args) => restore::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Reproduce(args) => bench::run_reproduce(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}
