//! The QGMRES family: plain, left- and right-preconditioned, and flexible.

use crate::error::{Error, Result};
use crate::krylov::arnoldi::{KrylovCycle, PrecondSide};
use crate::krylov::precond::{Preconditioner, StepContext};
use crate::qmat::QMatrix;
use crate::qvec::QVector;
use std::time::Instant;

/// Stopping and restart parameters shared by all solver variants.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Relative residual threshold.
    pub tol: f64,
    /// Iteration cap across restart cycles.
    pub max_iter: usize,
    /// Cycle length; `None` runs non-restarted.
    pub restart: Option<usize>,
    /// Threshold on `h_{j+1,j}` declaring a breakdown; `None` selects
    /// `1e-13 * ||A||_F`.
    pub breakdown_tol: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iter: 500,
            restart: None,
            breakdown_tol: None,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolverConfig {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter("tol must be nonnegative".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if let Some(r) = self.restart {
            if r == 0 || r > self.max_iter {
                return Err(Error::InvalidParameter(
                    "restart must satisfy 1 <= restart <= max_iter".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    /// `h_{j+1,j}` fell below the breakdown tolerance; `exact` marks the
    /// lucky case where the returned iterate solves the system.
    Breakdown {
        exact: bool,
    },
    /// Relative residual decrease stayed below 1e-14 for 20 consecutive steps.
    Stagnation,
}

/// What the entries of `residual_history` measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    /// True residual norms `||b - A x_m||`.
    True,
    /// Preconditioned residual norms `||P^{-1}(b - A x_m)||` (left variant).
    Preconditioned,
    /// Residuals of regularized iterates (not a minimized norm).
    Regularized,
}

/// Outcome of a solve: iterate, per-iteration minimized norms, and timings.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub x: QVector,
    /// Absolute norms, starting with the initial residual. Nonincreasing
    /// within a cycle for the minimum-residual solvers.
    pub residual_history: Vec<f64>,
    pub residual_kind: ResidualKind,
    pub iterations: usize,
    /// Wall-clock seconds.
    pub wall_time: f64,
    pub termination: Termination,
    /// Denominator used for relative-residual tests (`||b||`, or
    /// `||P^{-1} b||` for the left-preconditioned variant).
    pub residual_scale: f64,
    pub b_norm: f64,
    /// `||b - A x||` recomputed explicitly at exit.
    pub final_true_residual: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::Converged | Termination::Breakdown { exact: true }
        )
    }

    /// History entries divided by the residual scale.
    pub fn relative_history(&self) -> Vec<f64> {
        self.residual_history
            .iter()
            .map(|r| r / self.residual_scale)
            .collect()
    }

    pub fn final_relative_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0) / self.residual_scale
    }

    pub fn final_true_relative(&self) -> f64 {
        if self.b_norm > 0.0 {
            self.final_true_residual / self.b_norm
        } else {
            self.final_true_residual
        }
    }
}

const STAGNATION_WINDOW: usize = 20;
const STAGNATION_EPS: f64 = 1e-14;

/// QGMRES: minimizes `||b - A x||_2` over `x0 + K_m(A, r0)`.
pub fn qgmres(
    a: &QMatrix,
    b: &QVector,
    x0: Option<&QVector>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    drive(a, b, x0, None, PrecondSide::None, cfg)
}

/// Left-preconditioned QGMRES: minimizes the preconditioned residual
/// `||P^{-1}(b - A x)||_2`; the history holds preconditioned norms and the
/// true residual is computed once at exit.
pub fn qgmres_left(
    a: &QMatrix,
    b: &QVector,
    x0: Option<&QVector>,
    p: &dyn Preconditioner,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    drive(a, b, x0, Some(p), PrecondSide::Left, cfg)
}

/// Right-preconditioned QGMRES: minimizes the true residual
/// `||b - A P^{-1} u||_2` with `x = x0 + P^{-1} V_m y_m`.
pub fn qgmres_right(
    a: &QMatrix,
    b: &QVector,
    x0: Option<&QVector>,
    p: &dyn Preconditioner,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    drive(a, b, x0, Some(p), PrecondSide::Right, cfg)
}

/// Flexible QGMRES: the preconditioner may change every step; the solution
/// is expressed in the preconditioned basis, `x = x0 + Z_m y_m`, and the
/// minimized norm is the true residual over `x0 + span(Z_m)`.
pub fn fqgmres(
    a: &QMatrix,
    b: &QVector,
    x0: Option<&QVector>,
    p: &dyn Preconditioner,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    drive(a, b, x0, Some(p), PrecondSide::Flexible, cfg)
}

fn drive(
    a: &QMatrix,
    b: &QVector,
    x0: Option<&QVector>,
    precond: Option<&dyn Preconditioner>,
    side: PrecondSide,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if a.nrows() != a.ncols() {
        return Err(Error::dimension(format!(
            "solver needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.len() != a.nrows() {
        return Err(Error::dimension("right-hand side length mismatch"));
    }
    if let Some(x0) = x0 {
        if x0.len() != a.nrows() {
            return Err(Error::dimension("x0 length mismatch"));
        }
    }
    let start = Instant::now();
    let breakdown_tol = cfg.breakdown_tol.unwrap_or_else(|| 1e-13 * a.fnorm());
    let mut x = x0.cloned().unwrap_or_else(|| QVector::zeros(a.nrows()));
    let b_norm = b.norm2();

    // Residual scale: ||b|| in the true-residual norm, ||P^{-1} b|| for the
    // left-preconditioned norm. Zero rhs falls back to absolute residuals.
    let residual_scale = match side {
        PrecondSide::Left => precond.unwrap().apply(b, &StepContext::fixed(0))?.norm2(),
        _ => b_norm,
    };
    let scale = if residual_scale > 0.0 {
        residual_scale
    } else {
        1.0
    };

    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0usize;
    let mut stall = 0usize;
    let termination;

    'cycles: loop {
        let r_true = b.sub(&a.matvec(&x)?)?;
        let r = match side {
            PrecondSide::Left => precond
                .unwrap()
                .apply(&r_true, &StepContext::fixed(iterations))?,
            _ => r_true.clone(),
        };
        let beta = r.norm2();
        if history.is_empty() {
            history.push(beta);
        }
        if beta <= cfg.tol * scale {
            termination = Termination::Converged;
            break 'cycles;
        }

        let cycle_limit = cfg.restart.unwrap_or(cfg.max_iter);
        let mut cycle = KrylovCycle::new(&r, breakdown_tol);
        // The running true residual, maintained for residual-dependent
        // flexible preconditioners.
        let wants_residual =
            side == PrecondSide::Flexible && precond.map(|p| p.needs_residual()).unwrap_or(false);
        let mut current_residual = r_true;
        let mut prev = beta;

        loop {
            let v = cycle.last_basis().clone();
            let ctx = StepContext {
                iteration: iterations,
                residual: if wants_residual {
                    Some(&current_residual)
                } else {
                    None
                },
            };
            let (w, z) = match side {
                PrecondSide::None => (a.matvec(&v)?, None),
                PrecondSide::Left => (precond.unwrap().apply(&a.matvec(&v)?, &ctx)?, None),
                PrecondSide::Right => (a.matvec(&precond.unwrap().apply(&v, &ctx)?)?, None),
                PrecondSide::Flexible => {
                    let mut zj = precond.unwrap().apply(&v, &ctx)?;
                    // Unit-normalize the flexible direction; the coefficient
                    // solve absorbs the scale.
                    let zn = zj.norm2();
                    if zn > 0.0 {
                        zj.scale_real(1.0 / zn);
                    }
                    (a.matvec(&zj)?, Some(zj))
                }
            };
            iterations += 1;
            let outcome = cycle.absorb(w, z)?;
            history.push(outcome.resnorm);

            if (prev - outcome.resnorm) < STAGNATION_EPS * prev {
                stall += 1;
            } else {
                stall = 0;
            }
            prev = outcome.resnorm;

            let converged = outcome.resnorm <= cfg.tol * scale;
            if converged {
                apply_update(&mut x, &cycle, side, precond, iterations)?;
                termination = Termination::Converged;
                break 'cycles;
            }
            if outcome.breakdown {
                apply_update(&mut x, &cycle, side, precond, iterations)?;
                let exact = outcome.resnorm <= (cfg.tol * scale).max(1e-8 * scale);
                termination = Termination::Breakdown { exact };
                break 'cycles;
            }
            if stall >= STAGNATION_WINDOW {
                apply_update(&mut x, &cycle, side, precond, iterations)?;
                termination = Termination::Stagnation;
                break 'cycles;
            }
            if iterations >= cfg.max_iter {
                apply_update(&mut x, &cycle, side, precond, iterations)?;
                termination = Termination::MaxIter;
                break 'cycles;
            }
            if cycle.steps() >= cycle_limit {
                apply_update(&mut x, &cycle, side, precond, iterations)?;
                continue 'cycles;
            }
            if wants_residual {
                current_residual = cycle.residual_vector()?;
            }
        }
    }

    let final_true_residual = b.sub(&a.matvec(&x)?)?.norm2();
    Ok(SolveReport {
        x,
        residual_history: history,
        residual_kind: if side == PrecondSide::Left {
            ResidualKind::Preconditioned
        } else {
            ResidualKind::True
        },
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
        termination,
        residual_scale: scale,
        b_norm,
        final_true_residual,
    })
}

fn apply_update(
    x: &mut QVector,
    cycle: &KrylovCycle,
    side: PrecondSide,
    precond: Option<&dyn Preconditioner>,
    iteration: usize,
) -> Result<()> {
    let y = cycle.coefficients()?;
    let update = match side {
        PrecondSide::None | PrecondSide::Left => cycle.combine_basis(&y)?,
        // One application of P^{-1} to the combination V_m y_m.
        PrecondSide::Right => precond
            .unwrap()
            .apply(&cycle.combine_basis(&y)?, &StepContext::fixed(iteration))?,
        PrecondSide::Flexible => cycle.combine_flexible(&y)?,
    };
    *x = x.add(&update)?;
    Ok(())
}
