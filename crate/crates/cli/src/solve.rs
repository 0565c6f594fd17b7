//! `quatkrylov solve`: quaternion linear systems from Matrix Market files.

use crate::common::{
    check_readable, echo_from, exit_code_for, maybe_write_log, print_report, PrecondKind,
    SolverKind, StoppingArgs,
};
use anyhow::{bail, Context, Result};
use quatkrylov_core::instances;
use quatkrylov_core::io::{read_qmatrix, read_qvector, MatrixMarketBundle, RunLog};
use quatkrylov_core::krylov::{
    fqgmres, jacobi_sqrt_residual, qgmres, qgmres_left, qgmres_right, sgs_preconditioner,
    SolveReport,
};
use quatkrylov_core::{QMatrix, QVector};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args, Debug)]
pub struct SolveArgs {
    /// Extended quaternion Matrix Market file (`%%QuaternionMatrixMarket`).
    #[arg(long, conflicts_with_all = ["a0", "a1", "a2", "a3"])]
    pub matrix: Option<PathBuf>,
    /// Matrix Market file of the real part.
    #[arg(long)]
    pub a0: Option<PathBuf>,
    /// Matrix Market file of the i-coefficient part.
    #[arg(long)]
    pub a1: Option<PathBuf>,
    /// Matrix Market file of the j-coefficient part.
    #[arg(long)]
    pub a2: Option<PathBuf>,
    /// Matrix Market file of the k-coefficient part.
    #[arg(long)]
    pub a3: Option<PathBuf>,
    /// Take the leading k x k principal submatrix.
    #[arg(long)]
    pub order: Option<usize>,
    /// Right-hand side: `ones`, `random:<seed>`, or an extended file path.
    #[arg(long, default_value = "ones")]
    pub rhs: String,
    #[arg(long, value_enum, default_value_t = SolverKind::Qgmres)]
    pub solver: SolverKind,
    #[arg(long, value_enum, default_value_t = PrecondKind::None)]
    pub precond: PrecondKind,
    #[command(flatten)]
    pub stopping: StoppingArgs,
    /// Write a JSON run log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

fn load_matrix(args: &SolveArgs) -> Result<QMatrix> {
    let bundle = if let Some(path) = &args.matrix {
        check_readable(path)?;
        MatrixMarketBundle::Extended(path.clone())
    } else {
        let parts = [
            args.a0.clone(),
            args.a1.clone(),
            args.a2.clone(),
            args.a3.clone(),
        ];
        if parts.iter().all(|p| p.is_none()) {
            bail!("provide --matrix or at least one of --a0/--a1/--a2/--a3");
        }
        for p in parts.iter().flatten() {
            check_readable(p)?;
        }
        MatrixMarketBundle::Parts(parts)
    };
    Ok(read_qmatrix(&bundle, args.order).context("reading the quaternion matrix")?)
}

fn load_rhs(spec: &str, n: usize) -> Result<QVector> {
    if spec == "ones" {
        return Ok(instances::ones_rhs(n));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed.parse().context("random rhs seed")?;
        return Ok(instances::random_qvector(n, seed));
    }
    let path = PathBuf::from(spec);
    check_readable(&path)?;
    let v = read_qvector(&path).context("reading the right-hand side")?;
    if v.len() != n {
        bail!("rhs length {} does not match system size {n}", v.len());
    }
    Ok(v)
}

pub fn run(args: SolveArgs) -> Result<ExitCode> {
    let a = load_matrix(&args)?;
    if a.nrows() != a.ncols() {
        bail!(
            "system matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        );
    }
    let b = load_rhs(&args.rhs, a.nrows())?;
    let cfg = args.stopping.to_config();

    let solver_name = match args.solver {
        SolverKind::Qgmres => "qgmres",
        SolverKind::QgmresLp => "qgmres-lp",
        SolverKind::QgmresRp => "qgmres-rp",
        SolverKind::Fqgmres => "fqgmres",
    };
    let report: SolveReport = match (args.solver, args.precond) {
        (SolverKind::Qgmres, PrecondKind::None) => qgmres(&a, &b, None, &cfg)?,
        (SolverKind::Qgmres, _) => {
            bail!("qgmres takes no preconditioner; use qgmres-lp or qgmres-rp")
        }
        (SolverKind::QgmresLp | SolverKind::QgmresRp, PrecondKind::Sgs) => {
            let p = sgs_preconditioner(&a)?;
            if args.solver == SolverKind::QgmresLp {
                qgmres_left(&a, &b, None, &p, &cfg)?
            } else {
                qgmres_right(&a, &b, None, &p, &cfg)?
            }
        }
        (SolverKind::QgmresLp | SolverKind::QgmresRp, _) => {
            bail!("left/right preconditioned solvers need --precond sgs")
        }
        (SolverKind::Fqgmres, PrecondKind::JacobiSqrtRes | PrecondKind::None) => {
            fqgmres(&a, &b, None, &jacobi_sqrt_residual(), &cfg)?
        }
        (SolverKind::Fqgmres, PrecondKind::Sgs) => {
            let p = sgs_preconditioner(&a)?;
            fqgmres(&a, &b, None, &p, &cfg)?
        }
    };

    print_report(solver_name, &report);
    let log = RunLog::from_report(
        solver_name,
        echo_from(&cfg, Some(args.precond.name())),
        &report,
    );
    maybe_write_log(&log, args.log.as_ref())?;
    Ok(exit_code_for(&report))
}
