//! Upper-Hessenberg quaternion least-squares solves.
//!
//! Each Krylov iteration needs the minimizer of `|| beta e_1 - H y ||_2`
//! over `Q^m` for the current `(m+1) x m` quaternion Hessenberg matrix.
//! Stacking the four components of every quaternion turns this into an
//! ordinary real least-squares problem on the interleaved real counterpart
//! (the embedding is an isometry, so minimizers and residual norms agree
//! exactly). [`solve_hqls`] performs one such solve from scratch with a
//! rank-revealing factorization; [`HessenbergLsq`] maintains a growing
//! Householder QR so the per-iteration residual norm costs `O(m^2)`.

use crate::error::{Error, Result};
use crate::linalg::dense;
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;
use crate::realrep::{deinterleave_vec, interleaved_counterpart, scalar_counterpart};

/// Minimizer of `|| beta e_1 - h y ||_2` for an `(m+1) x m` quaternion
/// Hessenberg matrix. Rank deficiency yields the minimum-norm solution.
/// Returns `(y, residual_norm)`.
pub fn solve_hqls(h: &QMatrix, beta: f64) -> Result<(QVector, f64)> {
    let m = h.ncols();
    if m == 0 || h.nrows() != m + 1 {
        return Err(Error::dimension(format!(
            "Hessenberg least squares needs an (m+1) x m matrix, got {}x{}",
            h.nrows(),
            m
        )));
    }
    let a = interleaved_counterpart(h);
    let mut rhs = vec![0.0; a.nrows()];
    rhs[0] = beta;
    let (x, resnorm) = dense::min_norm_least_squares(&a, &rhs, 1e-13)?;
    Ok((deinterleave_vec(&x)?, resnorm))
}

struct Reflector {
    start: usize,
    tau: f64,
    /// Householder vector entries below the leading implicit `1`.
    tail: Vec<f64>,
}

impl Reflector {
    fn apply(&self, col: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let seg = &mut col[self.start..self.start + 1 + self.tail.len()];
        let mut dot = seg[0];
        for (u, v) in self.tail.iter().zip(&seg[1..]) {
            dot += u * v;
        }
        let t = self.tau * dot;
        seg[0] -= t;
        for (u, v) in self.tail.iter().zip(seg[1..].iter_mut()) {
            *v -= t * u;
        }
    }
}

/// Incrementally factored least-squares state for the Arnoldi Hessenberg.
///
/// Quaternion column `j` (entries `h_{1..j+2, j}`) expands to four real
/// columns of the interleaved counterpart; the Hessenberg sparsity makes the
/// appended rows zero in all previous columns, so previously computed
/// reflectors remain valid and only the new columns need processing.
pub(crate) struct HessenbergLsq {
    reflectors: Vec<Reflector>,
    /// Column `c` of the triangular factor holds rows `0..=c`.
    r_cols: Vec<Vec<f64>>,
    /// Transformed right-hand side, length `4 * (qcols + 1)`.
    g: Vec<f64>,
    qcols: usize,
}

impl HessenbergLsq {
    pub fn new(beta: f64) -> Self {
        HessenbergLsq {
            reflectors: Vec::new(),
            r_cols: Vec::new(),
            g: vec![beta, 0.0, 0.0, 0.0],
            qcols: 0,
        }
    }

    /// Appends quaternion Hessenberg column `j` with entries `h_{1..j+2, j}`.
    pub fn push_column(&mut self, col: &[Quaternion]) {
        assert_eq!(col.len(), self.qcols + 2, "Hessenberg column height");
        let rows_new = 4 * (self.qcols + 2);
        self.g.resize(rows_new, 0.0);

        // Expand to four interleaved real columns.
        let mut cols: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; rows_new]);
        for (bi, q) in col.iter().enumerate() {
            let block = scalar_counterpart(*q);
            for (cc, colv) in cols.iter_mut().enumerate() {
                for br in 0..4 {
                    colv[4 * bi + br] = block[br][cc];
                }
            }
        }

        for (cc, mut newcol) in cols.into_iter().enumerate() {
            for r in &self.reflectors {
                r.apply(&mut newcol);
            }
            let c = 4 * self.qcols + cc;
            let seg = &mut newcol[c..];
            let refl = make_reflector_inplace(seg);
            // Triangular column: rows 0..=c (diagonal now seg[0]).
            self.r_cols.push(newcol[..=c].to_vec());
            refl_with_start(&refl, c).apply(&mut self.g);
            self.reflectors.push(refl_with_start(&refl, c));
        }
        self.qcols += 1;
    }

    /// Current minimum of `|| beta e_1 - H y ||_2`.
    pub fn residual_norm(&self) -> f64 {
        let lo = 4 * self.qcols;
        self.g[lo..lo + 4].iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Solves for the quaternion coefficient vector by back substitution.
    /// Falls back to a rank-revealing solve when the triangle is singular.
    pub fn solve(&self, hess: &QMatrix, beta: f64) -> Result<QVector> {
        let k = 4 * self.qcols;
        let mut x = vec![0.0; k];
        let scale = self
            .r_cols
            .iter()
            .map(|c| c.last().unwrap().abs())
            .fold(0.0_f64, f64::max);
        for c in (0..k).rev() {
            let mut s = self.g[c];
            for j in (c + 1)..k {
                s -= self.r_cols[j][c] * x[j];
            }
            let d = self.r_cols[c][c];
            if d.abs() <= 1e-14 * scale {
                // Singular triangle (serious breakdown): defer to the
                // minimum-norm one-shot solve.
                return Ok(solve_hqls(hess, beta)?.0);
            }
            x[c] = s / d;
        }
        deinterleave_vec(&x)
    }
}

struct RawReflector {
    tau: f64,
    tail: Vec<f64>,
}

fn refl_with_start(r: &RawReflector, start: usize) -> Reflector {
    Reflector {
        start,
        tau: r.tau,
        tail: r.tail.clone(),
    }
}

/// Builds a Householder reflector over `seg`, leaving `seg[0]` as the new
/// diagonal value.
fn make_reflector_inplace(seg: &mut [f64]) -> RawReflector {
    let alpha = seg[0];
    let xnorm = seg[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return RawReflector {
            tau: 0.0,
            tail: vec![0.0; seg.len() - 1],
        };
    }
    let beta = -alpha.signum() * (alpha * alpha + xnorm * xnorm).sqrt();
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    let tail: Vec<f64> = seg[1..].iter().map(|t| t * scale).collect();
    seg[0] = beta;
    RawReflector { tau, tail }
}
