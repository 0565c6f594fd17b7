//! Compressed sparse row matrices over the reals.

use crate::error::{Error, Result};

/// Real sparse matrix in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct RealCsr {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl RealCsr {
    /// Builds from coordinate triplets; duplicate entries are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::dimension(format!(
                    "triplet ({i},{j}) outside {nrows}x{ncols}"
                )));
            }
        }
        let mut counts = vec![0usize; nrows + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut col_idx = vec![0usize; triplets.len()];
        let mut values = vec![0.0; triplets.len()];
        let mut next = counts.clone();
        for &(i, j, v) in triplets {
            let p = next[i];
            col_idx[p] = j;
            values[p] = v;
            next[i] += 1;
        }
        // Sort each row by column and merge duplicates.
        let mut out_ptr = vec![0usize; nrows + 1];
        let mut out_idx = Vec::with_capacity(col_idx.len());
        let mut out_val = Vec::with_capacity(values.len());
        for i in 0..nrows {
            let lo = counts[i];
            let hi = counts[i + 1];
            let mut row: Vec<(usize, f64)> = col_idx[lo..hi]
                .iter()
                .copied()
                .zip(values[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|e| e.0);
            for (j, v) in row {
                if let Some(last) = out_idx.last() {
                    if *last == j && out_ptr[i] < out_idx.len() {
                        *out_val.last_mut().unwrap() += v;
                        continue;
                    }
                }
                out_idx.push(j);
                out_val.push(v);
            }
            out_ptr[i + 1] = out_idx.len();
        }
        Ok(RealCsr {
            nrows,
            ncols,
            row_ptr: out_ptr,
            col_idx: out_idx,
            values: out_val,
        })
    }

    pub fn identity(n: usize) -> Self {
        let trip: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
        RealCsr::from_triplets(n, n, &trip).unwrap()
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            y[i] = s;
        }
        y
    }

    /// `y = A^T x` by scatter.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[p]] += self.values[p] * xi;
            }
        }
        y
    }

    /// Diagonal of `A^T diag(s) A` where `s` holds per-row scales.
    pub fn normal_diag_scaled(&self, row_scales: &[f64]) -> Vec<f64> {
        assert_eq!(row_scales.len(), self.nrows);
        let mut d = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let s = row_scales[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.values[p];
                d[self.col_idx[p]] += s * v * v;
            }
        }
        d
    }
}
