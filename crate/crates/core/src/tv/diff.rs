//! Forward-difference operators and the isotropic total variation.

use crate::error::{Error, Result};
use crate::linalg::RealCsr;
use crate::qvec::QVector;

/// Stacked first-difference operators.
///
/// For an `n x n` color image stacked column-major into `x` of length
/// `N = n^2`, the stack holds the horizontal and vertical forward
/// differences, each of size `Ntilde x N` with `Ntilde = (n-1) n`
/// (`D_h = D_1d (x) I`, `D_v = I (x) D_1d`, where `D_1d` has `[1, -1]` rows).
/// For a 1-D signal there is a single `len-1 x len` difference block.
///
/// Each block annihilates per-channel constants, so the stacked operator has
/// the constant vector as its null space.
#[derive(Clone, Debug)]
pub struct DifferenceStack {
    n_values: usize,
    block_rows: usize,
    blocks: Vec<RealCsr>,
}

impl DifferenceStack {
    /// Differences of an `n x n` image (column-major stacking).
    pub fn image(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "image difference stack needs side >= 2".into(),
            ));
        }
        let big_n = n * n;
        let rows = (n - 1) * n;
        // Horizontal: difference across columns, one row per (col pair, row).
        let mut trip_h = Vec::with_capacity(2 * rows);
        for i in 0..(n - 1) {
            for t in 0..n {
                let r = i * n + t;
                trip_h.push((r, i * n + t, 1.0));
                trip_h.push((r, (i + 1) * n + t, -1.0));
            }
        }
        // Vertical: difference within a column.
        let mut trip_v = Vec::with_capacity(2 * rows);
        for c in 0..n {
            for i in 0..(n - 1) {
                let r = c * (n - 1) + i;
                trip_v.push((r, c * n + i, 1.0));
                trip_v.push((r, c * n + i + 1, -1.0));
            }
        }
        Ok(DifferenceStack {
            n_values: big_n,
            block_rows: rows,
            blocks: vec![
                RealCsr::from_triplets(rows, big_n, &trip_h)?,
                RealCsr::from_triplets(rows, big_n, &trip_v)?,
            ],
        })
    }

    /// Single-block differences of a length-`len` signal.
    pub fn signal(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidParameter(
                "signal difference stack needs length >= 2".into(),
            ));
        }
        let rows = len - 1;
        let mut trip = Vec::with_capacity(2 * rows);
        for i in 0..rows {
            trip.push((i, i, 1.0));
            trip.push((i, i + 1, -1.0));
        }
        Ok(DifferenceStack {
            n_values: len,
            block_rows: rows,
            blocks: vec![RealCsr::from_triplets(rows, len, &trip)?],
        })
    }

    /// Length of vectors the stack applies to (`N`).
    pub fn n_values(&self) -> usize {
        self.n_values
    }

    /// Rows per difference block (`Ntilde`).
    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total rows of the stacked operator (`num_blocks * Ntilde`).
    pub fn stacked_rows(&self) -> usize {
        self.blocks.len() * self.block_rows
    }

    pub fn block(&self, b: usize) -> &RealCsr {
        &self.blocks[b]
    }

    /// Stacked application `[D_1 x; D_2 x; ...]` (componentwise on the four
    /// real parts since the differences are real).
    pub fn apply(&self, x: &QVector) -> Result<QVector> {
        if x.len() != self.n_values {
            return Err(Error::dimension(format!(
                "difference stack expects length {}, got {}",
                self.n_values,
                x.len()
            )));
        }
        let mut out = QVector::zeros(self.stacked_rows());
        for c in 0..4 {
            let xc = x.component(c);
            let oc = out.component_mut(c);
            for (b, d) in self.blocks.iter().enumerate() {
                let y = d.matvec(xc);
                oc[b * self.block_rows..(b + 1) * self.block_rows].copy_from_slice(&y);
            }
        }
        Ok(out)
    }

    /// Transpose of [`DifferenceStack::apply`].
    pub fn apply_transpose(&self, u: &QVector) -> Result<QVector> {
        if u.len() != self.stacked_rows() {
            return Err(Error::dimension("stacked vector length mismatch"));
        }
        let mut out = QVector::zeros(self.n_values);
        for c in 0..4 {
            let uc = u.component(c);
            let oc = out.component_mut(c);
            for (b, d) in self.blocks.iter().enumerate() {
                let y = d.matvec_transpose(&uc[b * self.block_rows..(b + 1) * self.block_rows]);
                for (o, v) in oc.iter_mut().zip(&y) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }

    /// Per-stencil gradient magnitudes `(sum_b |[D_b x]_i|^2)^(1/2)`.
    pub fn gradient_magnitudes(&self, x: &QVector) -> Result<Vec<f64>> {
        let d = self.apply(x)?;
        let mut mags = vec![0.0; self.block_rows];
        for (i, m) in mags.iter_mut().enumerate() {
            let mut s = 0.0;
            for b in 0..self.blocks.len() {
                s += d.get(b * self.block_rows + i).norm_sqr();
            }
            *m = s.sqrt();
        }
        Ok(mags)
    }

    /// Isotropic total variation `sum_i (sum_b |[D_b x]_i|^2)^(1/2)`.
    pub fn total_variation(&self, x: &QVector) -> Result<f64> {
        Ok(self.gradient_magnitudes(x)?.iter().sum())
    }
}

/// Total variation of an `n x n` image vector (`length n^2`, column-major).
pub fn qtv(x: &QVector, n: usize) -> Result<f64> {
    let stack = DifferenceStack::image(n)?;
    stack.total_variation(x)
}
