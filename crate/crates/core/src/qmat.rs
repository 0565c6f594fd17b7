//! Quaternion matrices with dense and compressed-column sparse storage.

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::qvec::QVector;

/// Dense storage: four column-major real matrices, one per component.
#[derive(Clone, Debug, PartialEq)]
struct DenseParts {
    parts: [Vec<f64>; 4],
}

/// Sparse storage: compressed-column with a pattern shared by all four
/// component value arrays.
#[derive(Clone, Debug, PartialEq)]
struct CscParts {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: [Vec<f64>; 4],
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense(DenseParts),
    Sparse(CscParts),
}

/// A quaternion matrix `A = A0 + A1 i + A2 j + A3 k`.
///
/// Matrix-vector products act with entries on the left of vector entries:
/// `(A x)_i = sum_j a_ij * x_j`, matching the right-module convention used
/// throughout (Krylov combinations multiply scalars on the right).
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    nrows: usize,
    ncols: usize,
    repr: Repr,
}

impl QMatrix {
    pub fn dense_zeros(nrows: usize, ncols: usize) -> Self {
        QMatrix {
            nrows,
            ncols,
            repr: Repr::Dense(DenseParts {
                parts: std::array::from_fn(|_| vec![0.0; nrows * ncols]),
            }),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = QMatrix::dense_zeros(n, n);
        for i in 0..n {
            a.set(i, i, Quaternion::ONE);
        }
        a
    }

    pub fn sparse_identity(n: usize) -> Self {
        let trip: Vec<(usize, usize, Quaternion)> =
            (0..n).map(|i| (i, i, Quaternion::ONE)).collect();
        QMatrix::from_triplets(n, n, &trip).unwrap()
    }

    pub fn from_fn(
        nrows: usize,
        ncols: usize,
        mut f: impl FnMut(usize, usize) -> Quaternion,
    ) -> Self {
        let mut a = QMatrix::dense_zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                a.set(i, j, f(i, j));
            }
        }
        a
    }

    /// Dense matrix from four component matrices given in column-major order.
    pub fn from_parts(nrows: usize, ncols: usize, parts: [Vec<f64>; 4]) -> Result<Self> {
        for p in &parts {
            if p.len() != nrows * ncols {
                return Err(Error::dimension("component matrix has wrong size"));
            }
        }
        Ok(QMatrix {
            nrows,
            ncols,
            repr: Repr::Dense(DenseParts { parts }),
        })
    }

    /// Embeds a real dense matrix (column-major) as a quaternion matrix with
    /// zero imaginary parts.
    pub fn from_real_dense(nrows: usize, ncols: usize, a0: Vec<f64>) -> Result<Self> {
        let z = vec![0.0; nrows * ncols];
        QMatrix::from_parts(nrows, ncols, [a0, z.clone(), z.clone(), z])
    }

    /// Sparse matrix from quaternion coordinate triplets; duplicates are
    /// summed componentwise, and the four parts share the union pattern.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, Quaternion)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::dimension(format!(
                    "triplet ({i},{j}) outside {nrows}x{ncols}"
                )));
            }
        }
        // Bucket by column, then sort rows and merge duplicates.
        let mut per_col: Vec<Vec<(usize, Quaternion)>> = vec![Vec::new(); ncols];
        for &(i, j, q) in triplets {
            per_col[j].push((i, q));
        }
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::new();
        let mut vals: [Vec<f64>; 4] = Default::default();
        col_ptr.push(0);
        for col in per_col.iter_mut() {
            col.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for &(i, q) in col.iter() {
                if last == Some(i) {
                    let p = row_idx.len() - 1;
                    vals[0][p] += q.w;
                    vals[1][p] += q.x;
                    vals[2][p] += q.y;
                    vals[3][p] += q.z;
                } else {
                    row_idx.push(i);
                    vals[0].push(q.w);
                    vals[1].push(q.x);
                    vals[2].push(q.y);
                    vals[3].push(q.z);
                    last = Some(i);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(QMatrix {
            nrows,
            ncols,
            repr: Repr::Sparse(CscParts {
                col_ptr,
                row_idx,
                vals,
            }),
        })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.repr {
            Repr::Dense(_) => self.nrows * self.ncols,
            Repr::Sparse(s) => s.row_idx.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        assert!(i < self.nrows && j < self.ncols);
        match &self.repr {
            Repr::Dense(d) => {
                let p = j * self.nrows + i;
                Quaternion::new(d.parts[0][p], d.parts[1][p], d.parts[2][p], d.parts[3][p])
            }
            Repr::Sparse(s) => {
                let lo = s.col_ptr[j];
                let hi = s.col_ptr[j + 1];
                match s.row_idx[lo..hi].binary_search(&i) {
                    Ok(off) => {
                        let p = lo + off;
                        Quaternion::new(s.vals[0][p], s.vals[1][p], s.vals[2][p], s.vals[3][p])
                    }
                    Err(_) => Quaternion::ZERO,
                }
            }
        }
    }

    /// Writes an entry; dense storage only.
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        assert!(i < self.nrows && j < self.ncols);
        let nrows = self.nrows;
        match &mut self.repr {
            Repr::Dense(d) => {
                let p = j * nrows + i;
                d.parts[0][p] = q.w;
                d.parts[1][p] = q.x;
                d.parts[2][p] = q.y;
                d.parts[3][p] = q.z;
            }
            Repr::Sparse(_) => {
                panic!("set() requires dense storage; assemble sparse matrices from triplets")
            }
        }
    }

    pub fn to_dense(&self) -> QMatrix {
        match &self.repr {
            Repr::Dense(_) => self.clone(),
            Repr::Sparse(_) => {
                let mut a = QMatrix::dense_zeros(self.nrows, self.ncols);
                self.for_each_entry(|i, j, q| a.set(i, j, q));
                a
            }
        }
    }

    /// Visits stored entries (all entries for dense storage).
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Quaternion)) {
        match &self.repr {
            Repr::Dense(_) => {
                for j in 0..self.ncols {
                    for i in 0..self.nrows {
                        f(i, j, self.get(i, j));
                    }
                }
            }
            Repr::Sparse(s) => {
                for j in 0..self.ncols {
                    for p in s.col_ptr[j]..s.col_ptr[j + 1] {
                        f(
                            s.row_idx[p],
                            j,
                            Quaternion::new(s.vals[0][p], s.vals[1][p], s.vals[2][p], s.vals[3][p]),
                        );
                    }
                }
            }
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &QVector) -> Result<QVector> {
        if x.len() != self.ncols {
            return Err(Error::dimension(format!(
                "matvec: {}x{} with vector of length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = QVector::zeros(self.nrows);
        let (yw, yx, yy, yz) = y.components_mut();
        match &self.repr {
            Repr::Dense(d) => {
                let [a0, a1, a2, a3] = &d.parts;
                let n = self.nrows;
                for j in 0..self.ncols {
                    let q = x.get(j);
                    if q.is_zero() {
                        continue;
                    }
                    let (b0, b1, b2, b3) = (q.w, q.x, q.y, q.z);
                    let base = j * n;
                    for i in 0..n {
                        let (c0, c1, c2, c3) =
                            (a0[base + i], a1[base + i], a2[base + i], a3[base + i]);
                        yw[i] += c0 * b0 - c1 * b1 - c2 * b2 - c3 * b3;
                        yx[i] += c0 * b1 + c1 * b0 + c2 * b3 - c3 * b2;
                        yy[i] += c0 * b2 - c1 * b3 + c2 * b0 + c3 * b1;
                        yz[i] += c0 * b3 + c1 * b2 - c2 * b1 + c3 * b0;
                    }
                }
            }
            Repr::Sparse(s) => {
                for j in 0..self.ncols {
                    let q = x.get(j);
                    if q.is_zero() {
                        continue;
                    }
                    let (b0, b1, b2, b3) = (q.w, q.x, q.y, q.z);
                    for p in s.col_ptr[j]..s.col_ptr[j + 1] {
                        let i = s.row_idx[p];
                        let (c0, c1, c2, c3) =
                            (s.vals[0][p], s.vals[1][p], s.vals[2][p], s.vals[3][p]);
                        yw[i] += c0 * b0 - c1 * b1 - c2 * b2 - c3 * b3;
                        yx[i] += c0 * b1 + c1 * b0 + c2 * b3 - c3 * b2;
                        yy[i] += c0 * b2 - c1 * b3 + c2 * b0 + c3 * b1;
                        yz[i] += c0 * b3 + c1 * b2 - c2 * b1 + c3 * b0;
                    }
                }
            }
        }
        Ok(y)
    }

    /// `C = A B` (densifies sparse operands).
    pub fn matmat(&self, b: &QMatrix) -> Result<QMatrix> {
        if self.ncols != b.nrows {
            return Err(Error::dimension(format!(
                "matmat: {}x{} times {}x{}",
                self.nrows, self.ncols, b.nrows, b.ncols
            )));
        }
        let a = self.to_dense();
        let bd = b.to_dense();
        let mut c = QMatrix::dense_zeros(self.nrows, b.ncols);
        for k in 0..bd.ncols {
            for j in 0..a.ncols {
                let bjk = bd.get(j, k);
                if bjk.is_zero() {
                    continue;
                }
                for i in 0..a.nrows {
                    let acc = c.get(i, k) + a.get(i, j) * bjk;
                    c.set(i, k, acc);
                }
            }
        }
        Ok(c)
    }

    /// Conjugate transpose `A*`.
    pub fn conj_transpose(&self) -> QMatrix {
        match &self.repr {
            Repr::Dense(_) => {
                QMatrix::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i).conj())
            }
            Repr::Sparse(_) => {
                let mut trip = Vec::with_capacity(self.nnz());
                self.for_each_entry(|i, j, q| trip.push((j, i, q.conj())));
                QMatrix::from_triplets(self.ncols, self.nrows, &trip).unwrap()
            }
        }
    }

    /// Frobenius norm `(sum |a_ij|^2)^(1/2)`.
    pub fn fnorm(&self) -> f64 {
        let mut s = 0.0;
        match &self.repr {
            Repr::Dense(d) => {
                for p in &d.parts {
                    for v in p {
                        s += v * v;
                    }
                }
            }
            Repr::Sparse(sp) => {
                for p in &sp.vals {
                    for v in p {
                        s += v * v;
                    }
                }
            }
        }
        s.sqrt()
    }

    pub fn scale_real(&mut self, t: f64) {
        match &mut self.repr {
            Repr::Dense(d) => {
                for p in &mut d.parts {
                    for v in p.iter_mut() {
                        *v *= t;
                    }
                }
            }
            Repr::Sparse(s) => {
                for p in &mut s.vals {
                    for v in p.iter_mut() {
                        *v *= t;
                    }
                }
            }
        }
    }

    pub fn add(&self, b: &QMatrix) -> Result<QMatrix> {
        if self.nrows != b.nrows || self.ncols != b.ncols {
            return Err(Error::dimension("matrix addition shape mismatch"));
        }
        let mut out = self.to_dense();
        b.for_each_entry(|i, j, q| {
            let s = out.get(i, j) + q;
            out.set(i, j, s);
        });
        Ok(out)
    }

    pub fn column(&self, j: usize) -> QVector {
        let mut v = QVector::zeros(self.nrows);
        match &self.repr {
            Repr::Dense(_) => {
                for i in 0..self.nrows {
                    v.set(i, self.get(i, j));
                }
            }
            Repr::Sparse(s) => {
                for p in s.col_ptr[j]..s.col_ptr[j + 1] {
                    v.set(
                        s.row_idx[p],
                        Quaternion::new(s.vals[0][p], s.vals[1][p], s.vals[2][p], s.vals[3][p]),
                    );
                }
            }
        }
        v
    }

    pub fn diagonal(&self) -> QVector {
        let n = self.nrows.min(self.ncols);
        QVector::from_fn(n, |i| self.get(i, i))
    }

    /// Builds a dense matrix from quaternion column vectors.
    pub fn from_columns(cols: &[QVector]) -> Result<QMatrix> {
        if cols.is_empty() {
            return Err(Error::dimension("no columns"));
        }
        let n = cols[0].len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::dimension("columns differ in length"));
        }
        let mut a = QMatrix::dense_zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                a.set(i, j, c.get(i));
            }
        }
        Ok(a)
    }

    /// True when the real part is entrywise zero.
    pub fn is_pure(&self, tol: f64) -> bool {
        let mut pure = true;
        self.for_each_entry(|_, _, q| {
            if q.w.abs() > tol {
                pure = false;
            }
        });
        pure
    }

    /// Leading `k x k` principal submatrix.
    pub fn principal_submatrix(&self, k: usize) -> Result<QMatrix> {
        if k > self.nrows || k > self.ncols {
            return Err(Error::InvalidParameter(format!(
                "principal submatrix order {k} exceeds {}x{}",
                self.nrows, self.ncols
            )));
        }
        if self.is_sparse() {
            let mut trip = Vec::new();
            self.for_each_entry(|i, j, q| {
                if i < k && j < k {
                    trip.push((i, j, q));
                }
            });
            QMatrix::from_triplets(k, k, &trip)
        } else {
            Ok(QMatrix::from_fn(k, k, |i, j| self.get(i, j)))
        }
    }
}

/// `y = A x` (function form).
pub fn matvec(a: &QMatrix, x: &QVector) -> Result<QVector> {
    a.matvec(x)
}

/// `C = A B` (function form).
pub fn matmat(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    a.matmat(b)
}

/// Frobenius norm (function form).
pub fn fnorm(a: &QMatrix) -> f64 {
    a.fnorm()
}
