//! Column-major dense real matrices with Householder-based least squares.

use crate::error::{Error, Result};

/// Dense real matrix, column-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMat {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl RealMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RealMat {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = RealMat::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.nrows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = self.col(j);
            for (yi, &aij) in y.iter_mut().zip(col) {
                *yi += aij * xj;
            }
        }
        y
    }

    pub fn matmul(&self, b: &RealMat) -> Result<RealMat> {
        if self.ncols != b.nrows {
            return Err(Error::dimension("real matmul dimension mismatch"));
        }
        let mut c = RealMat::zeros(self.nrows, b.ncols);
        for k in 0..b.ncols {
            for j in 0..self.ncols {
                let bjk = b.get(j, k);
                if bjk == 0.0 {
                    continue;
                }
                let col = self.col(j);
                let out = c.col_mut(k);
                for i in 0..col.len() {
                    out[i] += col[i] * bjk;
                }
            }
        }
        Ok(c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

/// One Householder reflector `H = I - tau u u^T` with `u[0] = 1`, chosen so
/// that `H a = (-sign(a_0) ||a||) e_1`. Returns `(tau, beta)` and rewrites
/// `a` to hold `u[1..]` below `beta` in `a[0]`.
fn make_reflector(a: &mut [f64]) -> (f64, f64) {
    let alpha = a[0];
    let xnorm = norm2(&a[1..]);
    if xnorm == 0.0 {
        return (0.0, alpha);
    }
    let beta = -alpha.signum() * (alpha * alpha + xnorm * xnorm).sqrt();
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for t in a[1..].iter_mut() {
        *t *= scale;
    }
    a[0] = beta;
    (tau, beta)
}

/// Applies `H = I - tau u u^T` (with `u = [1, u_rest]`) to `v` in place.
fn apply_reflector(tau: f64, u_rest: &[f64], v: &mut [f64]) {
    if tau == 0.0 {
        return;
    }
    let mut dot = v[0];
    for (ui, vi) in u_rest.iter().zip(&v[1..]) {
        dot += ui * vi;
    }
    let t = tau * dot;
    v[0] -= t;
    for (ui, vi) in u_rest.iter().zip(v[1..].iter_mut()) {
        *vi -= t * ui;
    }
}

/// Least-squares solve `min ||a x - b||_2` by Householder QR.
///
/// Requires `a.nrows >= a.ncols` and (numerically) full column rank; use
/// [`min_norm_least_squares`] when the rank may be deficient. Returns the
/// solution and the residual norm.
pub fn least_squares(a: &RealMat, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if b.len() != a.nrows {
        return Err(Error::dimension("least squares rhs length mismatch"));
    }
    if a.nrows < a.ncols {
        return Err(Error::dimension("least squares requires nrows >= ncols"));
    }
    let m = a.nrows;
    let n = a.ncols;
    let mut qr = a.clone();
    let mut rhs = b.to_vec();
    let mut taus = vec![0.0; n];

    for k in 0..n {
        let (head, tail) = qr.data.split_at_mut((k + 1) * m);
        let colk = &mut head[k * m + k..(k + 1) * m];
        let (tau, _) = make_reflector(colk);
        taus[k] = tau;
        // Freeze u_rest, then apply to the remaining columns and rhs.
        let u_rest = colk[1..].to_vec();
        for j in 0..(n - k - 1) {
            let cj = &mut tail[j * m + k..(j + 1) * m];
            apply_reflector(tau, &u_rest, cj);
        }
        apply_reflector(tau, &u_rest, &mut rhs[k..]);
    }

    // Back substitution on the triangular factor.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= qr.get(i, j) * x[j];
        }
        let d = qr.get(i, i);
        if d == 0.0 {
            return Err(Error::InvalidParameter(
                "rank-deficient least squares; use min_norm_least_squares".into(),
            ));
        }
        x[i] = s / d;
    }
    Ok((x, norm2(&rhs[n..])))
}

/// Result of a column-pivoted QR factorization.
struct PivotedQr {
    qr: RealMat,
    taus: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

fn pivoted_qr(a: &RealMat, rel_tol: f64) -> PivotedQr {
    let m = a.nrows;
    let n = a.ncols;
    let mut qr = a.clone();
    let mut taus = vec![0.0; n.min(m)];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut col_norms: Vec<f64> = (0..n).map(|j| norm2(qr.col(j))).collect();

    let kmax = n.min(m);
    let mut rank = kmax;
    let mut first_diag = 0.0_f64;
    for k in 0..kmax {
        // Pivot: bring the column with the largest remaining norm to front.
        let (pivot, &pn) = col_norms[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i + k, v))
            .unwrap();
        if pivot != k {
            col_norms.swap(k, pivot);
            perm.swap(k, pivot);
            for i in 0..m {
                let t = qr.get(i, k);
                qr.set(i, k, qr.get(i, pivot));
                qr.set(i, pivot, t);
            }
        }
        if k == 0 {
            first_diag = pn;
        }
        if pn <= rel_tol * first_diag || pn == 0.0 {
            rank = k;
            break;
        }

        let (head, tail) = qr.data.split_at_mut((k + 1) * m);
        let colk = &mut head[k * m + k..(k + 1) * m];
        let (tau, _) = make_reflector(colk);
        taus[k] = tau;
        let u_rest = colk[1..].to_vec();
        for j in 0..(n - k - 1) {
            let cj = &mut tail[j * m + k..(j + 1) * m];
            apply_reflector(tau, &u_rest, cj);
        }
        // Downdate remaining column norms (recompute: cheap at our sizes).
        for j in (k + 1)..n {
            col_norms[j] = norm2(&qr.col(j)[(k + 1)..]);
        }
    }
    PivotedQr {
        qr,
        taus,
        perm,
        rank,
    }
}

/// Numerical rank with relative threshold `rel_tol` on pivoted column norms.
pub fn rank(a: &RealMat, rel_tol: f64) -> usize {
    pivoted_qr(a, rel_tol).rank
}

/// Minimum-norm least-squares solution of `min ||a x - b||_2` via a complete
/// orthogonal decomposition (pivoted QR followed by an LQ step on the
/// leading rows). Handles rank deficiency; returns `(x, residual_norm)`.
pub fn min_norm_least_squares(a: &RealMat, b: &[f64], rel_tol: f64) -> Result<(Vec<f64>, f64)> {
    if b.len() != a.nrows {
        return Err(Error::dimension("least squares rhs length mismatch"));
    }
    let m = a.nrows;
    let n = a.ncols;
    let f = pivoted_qr(a, rel_tol);
    let r = f.rank;

    // Transform rhs by the stored reflectors.
    let mut rhs = b.to_vec();
    for k in 0..r {
        let tau = f.taus[k];
        let u_rest: Vec<f64> = (k + 1..m).map(|i| f.qr.get(i, k)).collect();
        apply_reflector(tau, &u_rest, &mut rhs[k..]);
    }
    let resnorm = norm2(&rhs[r..]);
    if r == 0 {
        return Ok((vec![0.0; n], resnorm));
    }

    // T = leading r x n block of the triangular factor; min-norm solution of
    // T u = rhs[0..r] via QR of T^T.
    let tt = RealMat::from_fn(n, r, |i, j| if i >= j { f.qr.get(j, i) } else { 0.0 });
    let mut qr2 = tt.clone();
    let mut taus2 = vec![0.0; r];
    for k in 0..r {
        let (head, tail) = qr2.data.split_at_mut((k + 1) * n);
        let colk = &mut head[k * n + k..(k + 1) * n];
        let (tau, _) = make_reflector(colk);
        taus2[k] = tau;
        let u_rest = colk[1..].to_vec();
        for j in 0..(r - k - 1) {
            let cj = &mut tail[j * n + k..(j + 1) * n];
            apply_reflector(tau, &u_rest, cj);
        }
    }
    // Forward substitution on R2^T s = rhs_head.
    let mut s = vec![0.0; r];
    for i in 0..r {
        let mut t = rhs[i];
        for j in 0..i {
            t -= qr2.get(j, i) * s[j];
        }
        let d = qr2.get(i, i);
        if d == 0.0 {
            return Err(Error::InvalidParameter(
                "degenerate triangular factor".into(),
            ));
        }
        s[i] = t / d;
    }
    // u = Q2 s: apply reflectors in reverse to [s; 0].
    let mut u = vec![0.0; n];
    u[..r].copy_from_slice(&s);
    for k in (0..r).rev() {
        let tau = taus2[k];
        let u_rest: Vec<f64> = (k + 1..n).map(|i| qr2.get(i, k)).collect();
        apply_reflector(tau, &u_rest, &mut u[k..]);
    }
    // Undo the column permutation.
    let mut x = vec![0.0; n];
    for (pos, &orig) in f.perm.iter().enumerate() {
        x[orig] = u[pos];
    }
    Ok((x, resnorm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut ChaCha8Rng, m: usize, n: usize) -> RealMat {
        RealMat::from_fn(m, n, |_, _| rng.random::<f64>() - 0.5)
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_mat(&mut rng, 9, 5);
            let x_true: Vec<f64> = (0..5).map(|_| rng.random::<f64>() - 0.5).collect();
            let b = a.matvec(&x_true);
            let (x, res) = least_squares(&a, &b).unwrap();
            for (xi, ti) in x.iter().zip(&x_true) {
                assert!((xi - ti).abs() < 1e-10);
            }
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn least_squares_residual_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_mat(&mut rng, 12, 4);
        let b: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
        let (x, res) = least_squares(&a, &b).unwrap();
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        assert!((norm2(&r) - res).abs() < 1e-10);
        // A^T r = 0 at the minimizer.
        for j in 0..a.ncols() {
            let dot: f64 = a.col(j).iter().zip(&r).map(|(u, v)| u * v).sum();
            assert!(dot.abs() < 1e-10);
        }
    }

    #[test]
    fn min_norm_handles_rank_deficiency() {
        // Two identical columns: infinitely many minimizers.
        let a = RealMat::from_fn(4, 2, |i, _| (i + 1) as f64);
        let b = vec![2.0, 4.0, 6.0, 8.0];
        let (x, res) = min_norm_least_squares(&a, &b, 1e-12).unwrap();
        assert!(res < 1e-12);
        // Minimum-norm solution splits the coefficient evenly.
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn min_norm_matches_plain_on_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_mat(&mut rng, 10, 6);
        let b: Vec<f64> = (0..10).map(|_| rng.random::<f64>() - 0.5).collect();
        let (x1, r1) = least_squares(&a, &b).unwrap();
        let (x2, r2) = min_norm_least_squares(&a, &b, 1e-12).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_detects_dependent_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_mat(&mut rng, 8, 3);
        // Append a column equal to col0 + col1.
        let b = RealMat::from_fn(8, 4, |i, j| {
            if j < 3 {
                a.get(i, j)
            } else {
                a.get(i, 0) + a.get(i, 1)
            }
        });
        assert_eq!(rank(&a, 1e-10), 3);
        assert_eq!(rank(&b, 1e-10), 3);
    }
}
