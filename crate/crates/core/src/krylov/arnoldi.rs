//! Quaternion Arnoldi process with modified Gram-Schmidt.

use crate::error::{Error, Result};
use crate::krylov::hqls::HessenbergLsq;
use crate::krylov::precond::{Preconditioner, StepContext};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;

/// Where a preconditioner enters the Arnoldi recurrence.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PrecondSide {
    None,
    Left,
    Right,
    Flexible,
}

/// Result of running `m` Arnoldi steps: orthonormal basis `V_{m+1}`, the
/// `(m+1) x m` quaternion Hessenberg `H`, the optional flexible basis `Z_m`,
/// and `beta`, the norm of the (possibly preconditioned) starting residual.
///
/// Satisfies `A V_m = V_{m+1} H` (plain and fixed-preconditioner runs on the
/// preconditioned operator) and `A Z_m = V_{m+1} H` in the flexible case.
#[derive(Clone, Debug)]
pub struct ArnoldiDecomposition {
    pub(crate) basis: Vec<QVector>,
    pub(crate) hess_cols: Vec<Vec<Quaternion>>,
    pub(crate) flexible: Option<Vec<QVector>>,
    pub(crate) beta: f64,
}

impl ArnoldiDecomposition {
    /// Completed steps `m`.
    pub fn steps(&self) -> usize {
        self.hess_cols.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Basis vectors `v_1 ..= v_{m+1}` (one fewer after a breakdown step).
    pub fn basis(&self) -> &[QVector] {
        &self.basis
    }

    pub fn flexible_basis(&self) -> Option<&[QVector]> {
        self.flexible.as_deref()
    }

    /// `V` as a dense matrix with the basis vectors as columns.
    pub fn basis_matrix(&self) -> QMatrix {
        QMatrix::from_columns(&self.basis).expect("nonempty basis")
    }

    /// `(m+1) x m` Hessenberg matrix (subdiagonal entries real nonnegative).
    pub fn hessenberg(&self) -> QMatrix {
        let m = self.steps();
        let mut h = QMatrix::dense_zeros(m + 1, m);
        for (j, col) in self.hess_cols.iter().enumerate() {
            for (i, &q) in col.iter().enumerate() {
                h.set(i, j, q);
            }
        }
        h
    }

    pub fn subdiagonal(&self, j: usize) -> f64 {
        self.hess_cols[j][j + 1].w
    }
}

/// Outcome of absorbing one candidate vector into the decomposition.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StepOutcome {
    pub resnorm: f64,
    pub breakdown: bool,
}

/// Shared engine: Arnoldi basis plus the incrementally factored Hessenberg
/// least-squares problem. Drives all GMRES variants in this crate.
pub(crate) struct KrylovCycle {
    pub basis: Vec<QVector>,
    pub flexible: Vec<QVector>,
    pub hess_cols: Vec<Vec<Quaternion>>,
    pub lsq: HessenbergLsq,
    pub beta: f64,
    pub breakdown_tol: f64,
}

impl KrylovCycle {
    /// Starts a cycle from residual `r0` with `beta = ||r0|| > 0`.
    pub fn new(r0: &QVector, breakdown_tol: f64) -> Self {
        let beta = r0.norm2();
        debug_assert!(beta > 0.0);
        KrylovCycle {
            basis: vec![r0.scaled_real(1.0 / beta)],
            flexible: Vec::new(),
            hess_cols: Vec::new(),
            lsq: HessenbergLsq::new(beta),
            beta,
            breakdown_tol,
        }
    }

    pub fn steps(&self) -> usize {
        self.hess_cols.len()
    }

    pub fn last_basis(&self) -> &QVector {
        self.basis.last().expect("basis nonempty")
    }

    /// Orthogonalizes `w` against the basis (modified Gram-Schmidt with one
    /// corrective pass on heavy cancellation), appends the Hessenberg column
    /// and, unless `h_{j+1,j}` falls at or below the breakdown tolerance, the
    /// next basis vector. `z` records the flexible direction that produced
    /// `w`, when there is one.
    pub fn absorb(&mut self, mut w: QVector, z: Option<QVector>) -> Result<StepOutcome> {
        let j = self.steps();
        let norm_before = w.norm2();
        let mut col: Vec<Quaternion> = Vec::with_capacity(j + 2);
        for v in &self.basis {
            let h = w.inner(v)?;
            w.sub_scaled_right(h, v);
            col.push(h);
        }
        if w.norm2() < std::f64::consts::FRAC_1_SQRT_2 * norm_before {
            for (i, v) in self.basis.iter().enumerate() {
                let c = w.inner(v)?;
                w.sub_scaled_right(c, v);
                col[i] += c;
            }
        }
        let subdiag = w.norm2();
        col.push(Quaternion::from_real(subdiag));
        self.lsq.push_column(&col);
        self.hess_cols.push(col);
        if let Some(z) = z {
            self.flexible.push(z);
        }
        let breakdown = subdiag <= self.breakdown_tol;
        if !breakdown {
            self.basis.push(w.scaled_real(1.0 / subdiag));
        }
        Ok(StepOutcome {
            resnorm: self.lsq.residual_norm(),
            breakdown,
        })
    }

    pub fn hessenberg(&self) -> QMatrix {
        let m = self.steps();
        let mut h = QMatrix::dense_zeros(m + 1, m);
        for (j, col) in self.hess_cols.iter().enumerate() {
            for (i, &q) in col.iter().enumerate() {
                h.set(i, j, q);
            }
        }
        h
    }

    /// Coefficients `y_m` of the current least-squares minimizer.
    pub fn coefficients(&self) -> Result<QVector> {
        self.lsq.solve(&self.hessenberg(), self.beta)
    }

    /// `V_m y` over the orthonormal basis.
    pub fn combine_basis(&self, y: &QVector) -> Result<QVector> {
        let m = y.len();
        let coeffs: Vec<Quaternion> = (0..m).map(|i| y.get(i)).collect();
        QVector::combine(&self.basis[..m], &coeffs)
    }

    /// `Z_m y` over the flexible directions.
    pub fn combine_flexible(&self, y: &QVector) -> Result<QVector> {
        let m = y.len();
        let coeffs: Vec<Quaternion> = (0..m).map(|i| y.get(i)).collect();
        QVector::combine(&self.flexible[..m], &coeffs)
    }

    /// Residual vector of the current minimizer, `V_{m+1} (beta e_1 - H y)`.
    pub fn residual_vector(&self) -> Result<QVector> {
        let y = self.coefficients()?;
        let hy = self.hessenberg().matvec(&y)?;
        let mut t = QVector::zeros(self.steps() + 1);
        t.set(0, Quaternion::from_real(self.beta));
        let t = t.sub(&hy)?;
        let coeffs: Vec<Quaternion> = (0..t.len()).map(|i| t.get(i)).collect();
        QVector::combine(&self.basis[..t.len()], &coeffs)
    }

    pub fn into_decomposition(self) -> ArnoldiDecomposition {
        ArnoldiDecomposition {
            basis: self.basis,
            hess_cols: self.hess_cols,
            flexible: if self.flexible.is_empty() {
                None
            } else {
                Some(self.flexible)
            },
            beta: self.beta,
        }
    }
}

/// Runs up to `max_steps` Arnoldi steps on `a` starting from `r0`, with the
/// preconditioner entering per `side`. Stops early on breakdown (grade of the
/// starting vector reached).
pub fn arnoldi(
    a: &QMatrix,
    r0: &QVector,
    max_steps: usize,
    precond: Option<&dyn Preconditioner>,
    side: PrecondSide,
    breakdown_tol: f64,
) -> Result<ArnoldiDecomposition> {
    if a.nrows() != a.ncols() {
        return Err(Error::dimension("Arnoldi needs a square matrix"));
    }
    if r0.len() != a.nrows() {
        return Err(Error::dimension("starting vector length mismatch"));
    }
    if r0.norm2() == 0.0 {
        return Err(Error::InvalidParameter("zero starting vector".into()));
    }
    if side != PrecondSide::None && precond.is_none() {
        return Err(Error::Preconditioner(
            "side requires a preconditioner".into(),
        ));
    }

    // For a left side the recurrence runs on P^{-1} r0.
    let start = match side {
        PrecondSide::Left => precond.unwrap().apply(
            r0,
            &StepContext {
                iteration: 0,
                residual: Some(r0),
            },
        )?,
        _ => r0.clone(),
    };
    let mut cycle = KrylovCycle::new(&start, breakdown_tol);
    for j in 0..max_steps {
        let v = cycle.last_basis().clone();
        let ctx = StepContext {
            iteration: j,
            residual: None,
        };
        let (w, z) = match side {
            PrecondSide::None => (a.matvec(&v)?, None),
            PrecondSide::Left => {
                let av = a.matvec(&v)?;
                (precond.unwrap().apply(&av, &ctx)?, None)
            }
            PrecondSide::Right => {
                let pv = precond.unwrap().apply(&v, &ctx)?;
                (a.matvec(&pv)?, None)
            }
            PrecondSide::Flexible => {
                let z = precond.unwrap().apply(&v, &ctx)?;
                (a.matvec(&z)?, Some(z))
            }
        };
        let outcome = cycle.absorb(w, z)?;
        if outcome.breakdown {
            break;
        }
    }
    Ok(cycle.into_decomposition())
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

    fn random_qmatrix(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
        QMatrix::from_fn(n, n, |_, _| rq(rng))
    }

    fn random_qvector(rng: &mut ChaCha8Rng, n: usize) -> QVector {
        QVector::from_fn(n, |_| rq(rng))
    }

    #[test]
    fn identity_breaks_down_at_step_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = QMatrix::identity(5);
        let r0 = random_qvector(&mut rng, 5);
        let dec = arnoldi(&a, &r0, 5, None, PrecondSide::None, 1e-13).unwrap();
        assert_eq!(dec.steps(), 1);
        assert!((dec.hessenberg().get(0, 0) - Quaternion::ONE).norm() < 1e-12);
        assert!(dec.subdiagonal(0) < 1e-13);
    }

    #[test]
    fn basis_is_orthonormal_and_decomposition_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 6;
        let a = random_qmatrix(&mut rng, n);
        let r0 = random_qvector(&mut rng, n);
        let dec = arnoldi(&a, &r0, 5, None, PrecondSide::None, 1e-13).unwrap();
        let m = dec.steps();
        assert_eq!(m, 5);

        // V* V = I
        let v = dec.basis_matrix();
        let gram = v.conj_transpose().matmat(&v).unwrap();
        for i in 0..m + 1 {
            for j in 0..m + 1 {
                let want = if i == j {
                    Quaternion::ONE
                } else {
                    Quaternion::ZERO
                };
                assert!(
                    (gram.get(i, j) - want).norm() < 1e-10,
                    "gram({i},{j}) = {}",
                    gram.get(i, j)
                );
            }
        }

        // A V_m = V_{m+1} H
        let vm = QMatrix::from_columns(&dec.basis()[..m]).unwrap();
        let av = a.matmat(&vm).unwrap();
        let vh = v.matmat(&dec.hessenberg()).unwrap();
        let mut diff = 0.0_f64;
        av.for_each_entry(|i, j, q| {
            diff += (q - vh.get(i, j)).norm_sqr();
        });
        assert!(diff.sqrt() <= 1e-10 * a.fnorm());

        // Subdiagonal entries are real nonnegative.
        for j in 0..m {
            let h = dec.hessenberg().get(j + 1, j);
            assert!(h.x == 0.0 && h.y == 0.0 && h.z == 0.0 && h.w >= 0.0);
        }
    }

    #[test]
    fn grade_limited_start_vector_breaks_down_at_mu() {
        // A = U diag(lambda) U* with distinct real eigenvalues and r0 a
        // combination of the first mu eigenvectors.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 7;
        let mu = 3;
        // Orthonormalize random columns.
        let mut cols: Vec<QVector> = Vec::new();
        for _ in 0..n {
            let mut w = random_qvector(&mut rng, n);
            for u in &cols {
                let c = w.inner(u).unwrap();
                w.sub_scaled_right(c, u);
            }
            w.scale_real(1.0 / w.norm2());
            cols.push(w);
        }
        let lambdas: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut a = QMatrix::dense_zeros(n, n);
        for (k, u) in cols.iter().enumerate() {
            // a += u * lambda_k * u^*
            for i in 0..n {
                for j in 0..n {
                    let add = u.get(i) * Quaternion::from_real(lambdas[k]) * u.get(j).conj();
                    let cur = a.get(i, j) + add;
                    a.set(i, j, cur);
                }
            }
        }
        let mut r0 = QVector::zeros(n);
        for u in cols.iter().take(mu) {
            r0.axpy_right(rq(&mut rng), u);
        }
        let dec = arnoldi(&a, &r0, n, None, PrecondSide::None, 1e-10 * a.fnorm()).unwrap();
        assert_eq!(dec.steps(), mu);
        assert!(dec.subdiagonal(mu - 1) <= 1e-10 * a.fnorm());
    }

    #[test]
    fn flexible_records_directions() {
        struct Scale;
        impl Preconditioner for Scale {
            fn apply(&self, v: &QVector, _ctx: &StepContext<'_>) -> Result<QVector> {
                Ok(v.scaled_real(0.5))
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let n = 5;
        let a = random_qmatrix(&mut rng, n);
        let r0 = random_qvector(&mut rng, n);
        let dec = arnoldi(&a, &r0, 3, Some(&Scale), PrecondSide::Flexible, 1e-13).unwrap();
        let z = dec.flexible_basis().unwrap();
        assert_eq!(z.len(), 3);
        // A Z_m = V_{m+1} H
        let az = a.matmat(&QMatrix::from_columns(z).unwrap()).unwrap();
        let vh = dec.basis_matrix().matmat(&dec.hessenberg()).unwrap();
        let mut diff = 0.0_f64;
        az.for_each_entry(|i, j, q| diff += (q - vh.get(i, j)).norm_sqr());
        assert!(diff.sqrt() <= 1e-10 * a.fnorm());
    }
}
