//! Shared flag parsing and report plumbing.

use anyhow::{bail, Context, Result};
use quatkrylov_core::io::{write_runlog, ConfigEcho, RunLog};
use quatkrylov_core::krylov::{SolveReport, SolverConfig, Termination};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverKind {
    Qgmres,
    #[value(name = "qgmres-lp")]
    QgmresLp,
    #[value(name = "qgmres-rp")]
    QgmresRp,
    Fqgmres,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PrecondKind {
    None,
    Sgs,
    #[value(name = "jacobi-sqrt-res")]
    JacobiSqrtRes,
}

impl PrecondKind {
    pub fn name(&self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Sgs => "sgs",
            PrecondKind::JacobiSqrtRes => "jacobi-sqrt-res",
        }
    }
}

/// Common stopping flags.
#[derive(clap::Args, Clone, Debug)]
pub struct StoppingArgs {
    /// Relative residual threshold.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Restart cycle length (non-restarted when omitted).
    #[arg(long)]
    pub restart: Option<usize>,
}

impl StoppingArgs {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            restart: self.restart,
            breakdown_tol: None,
        }
    }
}

pub fn exit_code_for(report: &SolveReport) -> ExitCode {
    match report.termination {
        Termination::Converged | Termination::Breakdown { exact: true } => ExitCode::SUCCESS,
        _ => ExitCode::from(2),
    }
}

pub fn echo_from(cfg: &SolverConfig, precond: Option<&str>) -> ConfigEcho {
    ConfigEcho {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        restart: cfg.restart,
        precond: precond.map(|s| s.to_string()),
        lambda: None,
        eps_irn: None,
        seed: None,
    }
}

pub fn maybe_write_log(log: &RunLog, path: Option<&PathBuf>) -> Result<()> {
    if let Some(path) = path {
        write_runlog(log, path).with_context(|| format!("writing run log {}", path.display()))?;
    }
    Ok(())
}

pub fn print_report(name: &str, report: &SolveReport) {
    println!(
        "{name}: {} after {} iterations, relative residual {:.4e} (true {:.4e}), {:.3}s",
        match report.termination {
            Termination::Converged => "converged",
            Termination::MaxIter => "stopped at max-iter",
            Termination::Breakdown { exact: true } => "exact breakdown",
            Termination::Breakdown { exact: false } => "breakdown",
            Termination::Stagnation => "stagnated",
        },
        report.iterations,
        report.final_relative_residual(),
        report.final_true_relative(),
        report.wall_time
    );
}

/// Thread cap for parallel bench seeds: `QUATKRYLOV_THREADS` bounds the
/// available parallelism (at least one).
pub fn thread_cap() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("QUATKRYLOV_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => avail,
            Ok(n) => n.min(avail),
        },
        Err(_) => avail,
    }
}

/// Parses `--lambda` values: a float or `auto`.
#[derive(Clone, Debug)]
pub enum LambdaFlag {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for LambdaFlag {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(LambdaFlag::Auto);
        }
        let v: f64 = s.parse().context("lambda must be a float or `auto`")?;
        if !(v >= 0.0) {
            bail!("lambda must be nonnegative");
        }
        Ok(LambdaFlag::Fixed(v))
    }
}

pub fn check_readable(path: &Path) -> Result<()> {
    if !path.exists() {
        bail!("input file {} does not exist", path.display());
    }
    Ok(())
}
