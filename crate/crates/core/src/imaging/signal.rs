//! Quaternion filter-identification systems for 3-D signals.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;

/// The linear system determining a quaternion filter `w(0..=order)` from an
/// input signal: row `t` encodes `y(t) = sum_s x(t - s) * w(s)` with the
/// sample multiplying the filter tap from the left and samples before the
/// first treated as zero, giving a lower-triangular quaternion Toeplitz
/// structure.
#[derive(Clone, Debug)]
pub struct SignalFilterSystem {
    pub signal_len: usize,
    pub filter_order: usize,
    pub matrix: QMatrix,
}

/// Builds the `T x (order + 1)` filter system from `T` input samples.
pub fn build_signal_system(samples: &QVector, filter_order: usize) -> Result<SignalFilterSystem> {
    let t_len = samples.len();
    if t_len == 0 {
        return Err(Error::dimension("empty signal"));
    }
    if t_len < filter_order + 1 {
        return Err(Error::dimension(format!(
            "signal length {t_len} shorter than filter length {}",
            filter_order + 1
        )));
    }
    let matrix = QMatrix::from_fn(t_len, filter_order + 1, |t, s| {
        if s <= t {
            samples.get(t - s)
        } else {
            Quaternion::ZERO
        }
    });
    Ok(SignalFilterSystem {
        signal_len: t_len,
        filter_order,
        matrix,
    })
}

impl SignalFilterSystem {
    /// Filtered output for a given tap stack.
    pub fn apply_filter(&self, taps: &QVector) -> Result<QVector> {
        self.matrix.matvec(taps)
    }

    /// Whether the system is square (full-order filter), directly solvable
    /// by the Krylov solvers.
    pub fn is_square(&self) -> bool {
        self.signal_len == self.filter_order + 1
    }

    /// Normal equations `(M* M) w = M* y` for overdetermined systems.
    pub fn normal_equations(&self, target: &QVector) -> Result<(QMatrix, QVector)> {
        if target.len() != self.signal_len {
            return Err(Error::dimension("target signal length mismatch"));
        }
        let mstar = self.matrix.conj_transpose();
        Ok((mstar.matmat(&self.matrix)?, mstar.matvec(target)?))
    }
}
