//! `quatkrylov filter-signal`: quaternion filter identification.

use crate::common::{
    check_readable, echo_from, exit_code_for, maybe_write_log, print_report, StoppingArgs,
};
use anyhow::{bail, Context, Result};
use quatkrylov_core::imaging::{build_signal_system, piecewise_filter, synthetic_rgb_signal};
use quatkrylov_core::io::{read_signal_csv, RunLog};
use quatkrylov_core::krylov::{
    fqgmres, jacobi_sqrt_residual, qgmres, qgmres_left, qgmres_right, sgs_preconditioner,
};
use quatkrylov_core::tv::{qtv_fqgmres, DifferenceStack, QtvConfig};
use quatkrylov_core::QVector;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SignalSolver {
    Qgmres,
    #[value(name = "qgmres-lp")]
    QgmresLp,
    #[value(name = "qgmres-rp")]
    QgmresRp,
    Fqgmres,
    #[value(name = "qtv-fqgmres")]
    QtvFqgmres,
}

#[derive(clap::Args, Debug)]
pub struct FilterSignalArgs {
    /// Input signal CSV with `t, r, g, b` columns (synthetic when omitted).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Target signal CSV; when omitted the target is synthesized by filtering
    /// the input with a seeded piecewise-constant filter.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Synthetic signal length.
    #[arg(long, default_value_t = 150)]
    pub length: usize,
    /// Filter order (defaults to 2/3 of the signal length).
    #[arg(long)]
    pub order: Option<usize>,
    /// Seed for the synthetic signal and filter.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SignalSolver::QtvFqgmres)]
    pub solver: SignalSolver,
    #[command(flatten)]
    pub stopping: StoppingArgs,
    /// Write a JSON run log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

pub fn run(args: FilterSignalArgs) -> Result<ExitCode> {
    let samples: QVector = match &args.input {
        Some(path) => {
            check_readable(path)?;
            read_signal_csv(path).context("reading the input signal")?
        }
        None => synthetic_rgb_signal(args.length, args.seed),
    };
    let t_len = samples.len();
    let order = args
        .order
        .unwrap_or_else(|| (2 * t_len / 3).saturating_sub(1));
    if order + 1 > t_len {
        bail!("filter order {order} too large for {t_len} samples");
    }
    let sys = build_signal_system(&samples, order)?;
    let target: QVector = match &args.target {
        Some(path) => {
            check_readable(path)?;
            let y = read_signal_csv(path).context("reading the target signal")?;
            if y.len() != t_len {
                bail!(
                    "target length {} does not match input length {t_len}",
                    y.len()
                );
            }
            y
        }
        None => {
            let w = piecewise_filter(order + 1, args.seed + 1);
            sys.apply_filter(&w)?
        }
    };

    // Square systems solve directly; tall ones through the normal equations.
    let (a, b) = if sys.is_square() {
        (sys.matrix.clone(), target.clone())
    } else {
        sys.normal_equations(&target)?
    };
    let cfg = args.stopping.to_config();

    let (name, report) = match args.solver {
        SignalSolver::Qgmres => ("qgmres", qgmres(&a, &b, None, &cfg)?),
        SignalSolver::QgmresLp => {
            let p = sgs_preconditioner(&a)?;
            ("qgmres-lp", qgmres_left(&a, &b, None, &p, &cfg)?)
        }
        SignalSolver::QgmresRp => {
            let p = sgs_preconditioner(&a)?;
            ("qgmres-rp", qgmres_right(&a, &b, None, &p, &cfg)?)
        }
        SignalSolver::Fqgmres => (
            "fqgmres",
            fqgmres(&a, &b, None, &jacobi_sqrt_residual(), &cfg)?,
        ),
        SignalSolver::QtvFqgmres => {
            let stack = DifferenceStack::signal(a.nrows())?;
            let qcfg = QtvConfig {
                inner: cfg.clone(),
                ..Default::default()
            };
            ("qtv-fqgmres", qtv_fqgmres(&a, &b, &stack, &qcfg)?)
        }
    };

    print_report(name, &report);
    // Report the fit on the original (possibly tall) system as well.
    let fit = target.sub(&sys.apply_filter(&report.x)?)?.norm2() / target.norm2().max(1e-300);
    println!("filter fit: relative output mismatch {fit:.4e}");

    let log = RunLog::from_report(name, echo_from(&cfg, None), &report);
    maybe_write_log(&log, args.log.as_ref())?;
    Ok(exit_code_for(&report))
}
