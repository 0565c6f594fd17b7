//! Grade of a vector with respect to a quaternion matrix.

use crate::error::{Error, Result};
use crate::linalg::dense;
use crate::linalg::RealMat;
use crate::qmat::QMatrix;
use crate::qvec::QVector;

/// Smallest `mu` such that `v, Av, ..., A^mu v` are right-linearly dependent
/// (equivalently, the dimension ceiling of the Krylov subspace generated by
/// `v`). Determined by the numerical rank of the real counterpart of the
/// Krylov matrix, with relative threshold `tol`.
pub fn grade(a: &QMatrix, v: &QVector, tol: f64) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::dimension("grade needs a square matrix"));
    }
    if v.len() != a.nrows() {
        return Err(Error::dimension("grade vector length mismatch"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(
            "grade tolerance must be positive".into(),
        ));
    }
    let n = a.nrows();
    let vnorm = v.norm2();
    if vnorm == 0.0 {
        return Err(Error::InvalidParameter("grade of the zero vector".into()));
    }

    // Normalized Krylov columns (normalization leaves spans unchanged).
    let mut cols: Vec<QVector> = vec![v.scaled_real(1.0 / vnorm)];
    for k in 1..=n {
        let mut next = a.matvec(cols.last().unwrap())?;
        let nn = next.norm2();
        if nn == 0.0 {
            // A^k v = 0: dependence occurs here.
            return Ok(rank_q(&cols, tol));
        }
        next.scale_real(1.0 / nn);
        cols.push(next);
        let r = rank_q(&cols, tol);
        if r < k + 1 {
            return Ok(r);
        }
    }
    // k = n columns were independent; the next power must be dependent.
    Ok(n)
}

/// Quaternion rank of a set of vectors via the real counterpart
/// (real rank is four times the quaternion rank).
fn rank_q(cols: &[QVector], tol: f64) -> usize {
    let n = cols[0].len();
    let mut m = RealMat::zeros(4 * n, 4 * cols.len());
    for (j, c) in cols.iter().enumerate() {
        // Four real columns per quaternion column: the counterpart blocks.
        for i in 0..n {
            let block = crate::realrep::scalar_counterpart(c.get(i));
            for br in 0..4 {
                for cc in 0..4 {
                    m.set(4 * i + br, 4 * j + cc, block[br][cc]);
                }
            }
        }
    }
    let r = dense::rank(&m, tol);
    ((r as f64) / 4.0).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    #[test]
    fn identity_has_grade_one() {
        let a = QMatrix::identity(4);
        let v = QVector::ones(4);
        assert_eq!(grade(&a, &v, 1e-10).unwrap(), 1);
    }

    #[test]
    fn diag_i_j_has_grade_two() {
        let a = QMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Quaternion::I,
            (1, 1) => Quaternion::J,
            _ => Quaternion::ZERO,
        });
        let v = QVector::ones(2);
        assert_eq!(grade(&a, &v, 1e-10).unwrap(), 2);
    }

    #[test]
    fn shift_matrix_has_full_grade() {
        let n = 5;
        let a = QMatrix::from_fn(n, n, |i, j| {
            if i == j + 1 {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            }
        });
        let v = QVector::unit(n, 0);
        assert_eq!(grade(&a, &v, 1e-10).unwrap(), n);
    }

    #[test]
    fn zero_vector_rejected() {
        let a = QMatrix::identity(3);
        assert!(grade(&a, &QVector::zeros(3), 1e-10).is_err());
    }
}
