//! Structure-preserving real counterpart of quaternion matrices and vectors.
//!
//! A quaternion matrix `A = A0 + A1 i + A2 j + A3 k` maps to the `4m x 4n`
//! real block matrix
//!
//! ```text
//!         | A0  -A1  -A2  -A3 |
//! R(A) =  | A1   A0  -A3   A2 |
//!         | A2   A3   A0  -A1 |
//!         | A3  -A2   A1   A0 |
//! ```
//!
//! which preserves sums and products: `R(AB) = R(A) R(B)`, and a quaternion
//! system `A x = b` is equivalent to `R(A) R(x) = R(b)`. Stacking the four
//! components of a vector (the first block column of `R(x)`) turns quaternion
//! least-squares problems into ordinary real ones without any structural
//! constraint, which is how the Hessenberg solves and the dense oracles in
//! this crate operate.

use crate::error::{Error, Result};
use crate::linalg::RealMat;
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;

/// The sign pattern of the 4x4 scalar counterpart: column `c` of the block
/// holds the components of `q * unit_c`.
#[inline]
pub fn scalar_counterpart(q: Quaternion) -> [[f64; 4]; 4] {
    let (a0, a1, a2, a3) = (q.w, q.x, q.y, q.z);
    [
        [a0, -a1, -a2, -a3],
        [a1, a0, -a3, a2],
        [a2, a3, a0, -a1],
        [a3, -a2, a1, a0],
    ]
}

/// Real counterpart of a quaternion matrix in the 4x4 block layout.
#[derive(Clone, Debug, PartialEq)]
pub struct RealCounterpart {
    qrows: usize,
    qcols: usize,
    mat: RealMat,
}

impl RealCounterpart {
    /// Quaternion shape `(m, n)` this counterpart encodes.
    pub fn quaternion_shape(&self) -> (usize, usize) {
        (self.qrows, self.qcols)
    }

    pub fn nrows(&self) -> usize {
        4 * self.qrows
    }

    pub fn ncols(&self) -> usize {
        4 * self.qcols
    }

    pub fn as_mat(&self) -> &RealMat {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }
}

/// Block-layout real counterpart `R(A)`.
pub fn to_real_counterpart(a: &QMatrix) -> RealCounterpart {
    let m = a.nrows();
    let n = a.ncols();
    let mut r = RealMat::zeros(4 * m, 4 * n);
    a.for_each_entry(|i, j, q| {
        let block = scalar_counterpart(q);
        for (br, row) in block.iter().enumerate() {
            for (bc, &v) in row.iter().enumerate() {
                r.set(br * m + i, bc * n + j, v);
            }
        }
    });
    RealCounterpart {
        qrows: m,
        qcols: n,
        mat: r,
    }
}

/// Inverse of [`to_real_counterpart`]; checks the block sign pattern to a
/// relative tolerance and reports [`Error::Structure`] on violation.
pub fn from_real_counterpart(r: &RealCounterpart) -> Result<QMatrix> {
    from_real_mat(&r.mat)
}

/// Reads a raw `4m x 4n` real matrix as a quaternion counterpart.
pub fn from_real_mat(r: &RealMat) -> Result<QMatrix> {
    if r.nrows() % 4 != 0 || r.ncols() % 4 != 0 {
        return Err(Error::Structure(format!(
            "real counterpart must be 4m x 4n, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let m = r.nrows() / 4;
    let n = r.ncols() / 4;
    // Candidate parts from the first block column.
    let mut a = QMatrix::dense_zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            a.set(
                i,
                j,
                Quaternion::new(
                    r.get(i, j),
                    r.get(m + i, j),
                    r.get(2 * m + i, j),
                    r.get(3 * m + i, j),
                ),
            );
        }
    }
    // Verify the remaining blocks match the sign pattern.
    let scale = r.max_abs().max(1.0);
    let tol = 1e-12 * scale;
    for j in 0..n {
        for i in 0..m {
            let block = scalar_counterpart(a.get(i, j));
            for (br, row) in block.iter().enumerate() {
                for (bc, &v) in row.iter().enumerate() {
                    let got = r.get(br * m + i, bc * n + j);
                    if (got - v).abs() > tol {
                        return Err(Error::Structure(format!(
                            "block ({br},{bc}) entry ({i},{j}) breaks the sign pattern: \
                             expected {v}, found {got}"
                        )));
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Stacked component embedding of a vector: `[w; x; y; z]`, the first block
/// column of `R(v)`. Real Euclidean norm equals the quaternion 2-norm.
pub fn stack_components(v: &QVector) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(4 * n);
    for c in 0..4 {
        out.extend_from_slice(v.component(c));
    }
    out
}

/// Inverse of [`stack_components`].
pub fn unstack_components(data: &[f64]) -> Result<QVector> {
    if data.len() % 4 != 0 {
        return Err(Error::dimension("stacked vector length not divisible by 4"));
    }
    let n = data.len() / 4;
    QVector::from_parts(
        data[..n].to_vec(),
        data[n..2 * n].to_vec(),
        data[2 * n..3 * n].to_vec(),
        data[3 * n..].to_vec(),
    )
}

/// Interleaved real counterpart: each quaternion entry becomes a contiguous
/// 4x4 block at `(4i, 4j)`. Same homomorphism as the block layout (the two
/// differ by a fixed permutation); rows and columns grow at the tail when the
/// quaternion matrix grows, which the incremental Hessenberg QR relies on.
pub fn interleaved_counterpart(a: &QMatrix) -> RealMat {
    let m = a.nrows();
    let n = a.ncols();
    let mut r = RealMat::zeros(4 * m, 4 * n);
    a.for_each_entry(|i, j, q| {
        let block = scalar_counterpart(q);
        for (br, row) in block.iter().enumerate() {
            for (bc, &v) in row.iter().enumerate() {
                r.set(4 * i + br, 4 * j + bc, v);
            }
        }
    });
    r
}

/// Interleaved component embedding: entry `i` occupies slots `4i..4i+4`.
pub fn interleave_vec(v: &QVector) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * v.len());
    for i in 0..v.len() {
        let q = v.get(i);
        out.extend_from_slice(&[q.w, q.x, q.y, q.z]);
    }
    out
}

/// Inverse of [`interleave_vec`].
pub fn deinterleave_vec(data: &[f64]) -> Result<QVector> {
    if data.len() % 4 != 0 {
        return Err(Error::dimension(
            "interleaved vector length not divisible by 4",
        ));
    }
    let n = data.len() / 4;
    Ok(QVector::from_fn(n, |i| {
        Quaternion::new(
            data[4 * i],
            data[4 * i + 1],
            data[4 * i + 2],
            data[4 * i + 3],
        )
    }))
}

/// Embeds a real counterpart back into quaternion storage with zero imaginary
/// parts: the degenerate system `R(A) y = c` solved by the quaternion solvers
/// behaves exactly like real GMRES (used as the "real baseline" in benches).
pub fn embed_block_counterpart(a: &QMatrix) -> QMatrix {
    let r = to_real_counterpart(a);
    let m = r.nrows();
    let n = r.ncols();
    if a.is_sparse() {
        let mut trip = Vec::with_capacity(16 * a.nnz());
        let qm = a.nrows();
        let qn = a.ncols();
        a.for_each_entry(|i, j, q| {
            let block = scalar_counterpart(q);
            for (br, row) in block.iter().enumerate() {
                for (bc, &v) in row.iter().enumerate() {
                    if v != 0.0 {
                        trip.push((br * qm + i, bc * qn + j, Quaternion::from_real(v)));
                    }
                }
            }
        });
        QMatrix::from_triplets(m, n, &trip).expect("block embedding triplets")
    } else {
        QMatrix::from_fn(m, n, |i, j| Quaternion::from_real(r.get(i, j)))
    }
}

/// Companion embedding for right-hand sides: `b` maps to the stacked real
/// components as a real-entry quaternion vector.
pub fn embed_block_vector(b: &QVector) -> QVector {
    let data = stack_components(b);
    QVector::from_fn(data.len(), |i| Quaternion::from_real(data[i]))
}

/// Reads the solution of an embedded real-counterpart solve back into a
/// quaternion vector.
pub fn extract_block_vector(x: &QVector) -> Result<QVector> {
    let data: Vec<f64> = (0..x.len()).map(|i| x.get(i).w).collect();
    unstack_components(&data)
}
