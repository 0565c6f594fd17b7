//! Preconditioners for the QGMRES family.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;

/// Per-step information handed to a preconditioner application.
pub struct StepContext<'a> {
    /// Global iteration index, 0-based.
    pub iteration: usize,
    /// Current residual vector, provided when [`Preconditioner::needs_residual`]
    /// returns true (flexible solvers only).
    pub residual: Option<&'a QVector>,
}

impl StepContext<'_> {
    pub fn fixed(iteration: usize) -> StepContext<'static> {
        StepContext {
            iteration,
            residual: None,
        }
    }
}

/// Applies `P^{-1}` to a quaternion vector; may depend on the iteration when
/// used by the flexible solver. Implementations must be reentrant so solves
/// can run concurrently.
pub trait Preconditioner: Send + Sync {
    fn apply(&self, v: &QVector, ctx: &StepContext<'_>) -> Result<QVector>;

    /// Whether `apply` reads `ctx.residual` (makes the flexible solver keep
    /// the running residual vector up to date).
    fn needs_residual(&self) -> bool {
        false
    }
}

/// `P = I`; for degenerate-configuration tests.
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, v: &QVector, _ctx: &StepContext<'_>) -> Result<QVector> {
        Ok(v.clone())
    }
}

/// Symmetric Gauss-Seidel (SSOR with unit relaxation):
/// `P = (D + L) D^{-1} (D + U)` with quaternion forward/backward sweeps.
pub struct SgsPreconditioner {
    diag: Vec<Quaternion>,
    diag_inv: Vec<Quaternion>,
    lower: Vec<Vec<(usize, Quaternion)>>,
    upper: Vec<Vec<(usize, Quaternion)>>,
}

impl SgsPreconditioner {
    pub fn new(a: &QMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Preconditioner("SGS needs a square matrix".into()));
        }
        let n = a.nrows();
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        let mut diag = vec![Quaternion::ZERO; n];
        a.for_each_entry(|i, j, q| {
            if q.is_zero() {
                return;
            }
            match j.cmp(&i) {
                std::cmp::Ordering::Less => lower[i].push((j, q)),
                std::cmp::Ordering::Equal => diag[i] = q,
                std::cmp::Ordering::Greater => upper[i].push((j, q)),
            }
        });
        let mut diag_inv = Vec::with_capacity(n);
        for (i, d) in diag.iter().enumerate() {
            diag_inv.push(d.inv().map_err(|_| {
                Error::Preconditioner(format!("SGS requires a nonzero diagonal (row {i})"))
            })?);
        }
        Ok(SgsPreconditioner {
            diag,
            diag_inv,
            lower,
            upper,
        })
    }
}

impl Preconditioner for SgsPreconditioner {
    fn apply(&self, v: &QVector, _ctx: &StepContext<'_>) -> Result<QVector> {
        let n = self.diag.len();
        if v.len() != n {
            return Err(Error::dimension("SGS apply length mismatch"));
        }
        // (D + L) u = v
        let mut u = QVector::zeros(n);
        for i in 0..n {
            let mut s = v.get(i);
            for &(j, a) in &self.lower[i] {
                s -= a * u.get(j);
            }
            u.set(i, self.diag_inv[i] * s);
        }
        // (D + U) z = D u
        let mut z = QVector::zeros(n);
        for i in (0..n).rev() {
            let mut s = self.diag[i] * u.get(i);
            for &(j, a) in &self.upper[i] {
                s -= a * z.get(j);
            }
            z.set(i, self.diag_inv[i] * s);
        }
        Ok(z)
    }
}

/// Iteration-dependent diagonal scaling `P_j = diag(sqrt(|r_j|))` built from
/// the flexible solver's running residual; entries are floored to avoid a
/// singular scale as the residual vanishes.
pub struct SqrtResidualPreconditioner {
    /// Absolute lower bound on the scale entries.
    pub floor: f64,
    /// Lower bound relative to the largest entry scale; `0` reproduces the
    /// raw rule, values near `1` flatten the scaling toward the identity.
    pub relative_floor: f64,
}

impl SqrtResidualPreconditioner {
    pub fn new() -> Self {
        SqrtResidualPreconditioner {
            floor: 1e-8,
            relative_floor: 0.0,
        }
    }

    pub fn with_floor(floor: f64) -> Self {
        SqrtResidualPreconditioner {
            floor,
            relative_floor: 0.0,
        }
    }

    pub fn with_relative_floor(relative_floor: f64) -> Self {
        SqrtResidualPreconditioner {
            floor: 1e-8,
            relative_floor,
        }
    }
}

impl Default for SqrtResidualPreconditioner {
    fn default() -> Self {
        Self::new()
    }
}

impl Preconditioner for SqrtResidualPreconditioner {
    fn apply(&self, v: &QVector, ctx: &StepContext<'_>) -> Result<QVector> {
        let r = ctx.residual.ok_or_else(|| {
            Error::Preconditioner("residual-scaled preconditioner needs the residual".into())
        })?;
        if r.len() != v.len() {
            return Err(Error::dimension("residual length mismatch"));
        }
        let mut floor = self.floor;
        if self.relative_floor > 0.0 {
            let mut wmax = 0.0_f64;
            for i in 0..r.len() {
                wmax = wmax.max(r.get(i).norm());
            }
            floor = floor.max(self.relative_floor * wmax.sqrt());
        }
        let mut z = QVector::zeros(v.len());
        for i in 0..v.len() {
            let w = r.get(i).norm().sqrt().max(floor);
            z.set(i, v.get(i).scale(1.0 / w));
        }
        Ok(z)
    }

    fn needs_residual(&self) -> bool {
        true
    }
}

/// Builds the SGS preconditioner for `a` (errors on any zero diagonal entry).
pub fn sgs_preconditioner(a: &QMatrix) -> Result<SgsPreconditioner> {
    SgsPreconditioner::new(a)
}

/// Builds the residual-scaled diagonal preconditioner with the default floor.
pub fn jacobi_sqrt_residual() -> SqrtResidualPreconditioner {
    SqrtResidualPreconditioner::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rq(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion::new(
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
        )
    }

    #[test]
    fn sgs_on_diagonal_matrix_divides_by_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let n = 6;
        let diag: Vec<Quaternion> = (0..n)
            .map(|_| rq(&mut rng) + Quaternion::from_real(2.0))
            .collect();
        let a = QMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { Quaternion::ZERO });
        let p = SgsPreconditioner::new(&a).unwrap();
        let v = QVector::from_fn(n, |_| rq(&mut rng));
        let z = p.apply(&v, &StepContext::fixed(0)).unwrap();
        for i in 0..n {
            let want = diag[i].inv().unwrap() * v.get(i);
            assert!((z.get(i) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn sgs_apply_matches_factored_form() {
        // P z = v reproduced by multiplying back (D+L) D^{-1} (D+U) z.
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let n = 5;
        let a = QMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Quaternion::from_real(4.0) + rq(&mut rng)
            } else {
                rq(&mut rng).scale(0.3)
            }
        });
        let p = SgsPreconditioner::new(&a).unwrap();
        let v = QVector::from_fn(n, |_| rq(&mut rng));
        let z = p.apply(&v, &StepContext::fixed(0)).unwrap();

        let dmat = QMatrix::from_fn(n, n, |i, j| {
            if i == j {
                a.get(i, i)
            } else {
                Quaternion::ZERO
            }
        });
        let lmat = QMatrix::from_fn(
            n,
            n,
            |i, j| if j < i { a.get(i, j) } else { Quaternion::ZERO },
        );
        let umat = QMatrix::from_fn(
            n,
            n,
            |i, j| if j > i { a.get(i, j) } else { Quaternion::ZERO },
        );
        let dinv = QMatrix::from_fn(n, n, |i, j| {
            if i == j {
                a.get(i, i).inv().unwrap()
            } else {
                Quaternion::ZERO
            }
        });
        let m = dmat
            .add(&lmat)
            .unwrap()
            .matmat(&dinv)
            .unwrap()
            .matmat(&dmat.add(&umat).unwrap())
            .unwrap();
        let back = m.matvec(&z).unwrap();
        assert!(back.sub(&v).unwrap().norm2() < 1e-10 * v.norm2().max(1.0));
    }

    #[test]
    fn sgs_improves_identity_distance_on_dominant_matrix() {
        // || I - P^{-1} A ||_F < || I - A ||_F on a small dominant matrix,
        // with P^{-1} A assembled column by column.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let n = 5;
        let a = QMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Quaternion::from_real(3.0 + rng.random::<f64>())
            } else {
                rq(&mut rng).scale(0.4)
            }
        });
        let p = SgsPreconditioner::new(&a).unwrap();
        let mut pa = QMatrix::dense_zeros(n, n);
        for j in 0..n {
            let col = p.apply(&a.column(j), &StepContext::fixed(0)).unwrap();
            for i in 0..n {
                pa.set(i, j, col.get(i));
            }
        }
        let eye = QMatrix::identity(n);
        let dist = |m: &QMatrix| {
            let mut s = 0.0;
            for j in 0..n {
                for i in 0..n {
                    s += (eye.get(i, j) - m.get(i, j)).norm_sqr();
                }
            }
            s.sqrt()
        };
        assert!(dist(&pa) < dist(&a));
    }

    #[test]
    fn sgs_rejects_zero_diagonal() {
        let a = QMatrix::from_fn(3, 3, |i, j| {
            if i == j && i == 1 {
                Quaternion::ZERO
            } else if i == j {
                Quaternion::ONE
            } else {
                Quaternion::from_real(0.1)
            }
        });
        assert!(matches!(
            SgsPreconditioner::new(&a),
            Err(Error::Preconditioner(_))
        ));
    }

    #[test]
    fn sqrt_residual_floors_at_zero_residual() {
        let p = SqrtResidualPreconditioner::with_floor(1e-8);
        let v = QVector::ones(4);
        let r = QVector::zeros(4);
        let ctx = StepContext {
            iteration: 0,
            residual: Some(&r),
        };
        let z = p.apply(&v, &ctx).unwrap();
        for i in 0..4 {
            let q = z.get(i);
            assert!(q.w.is_finite());
            assert!((q.w - 1e8).abs() < 1.0);
        }
    }

    #[test]
    fn sqrt_residual_requires_residual() {
        let p = SqrtResidualPreconditioner::new();
        assert!(p.needs_residual());
        let v = QVector::ones(2);
        assert!(p.apply(&v, &StepContext::fixed(0)).is_err());
    }
}
