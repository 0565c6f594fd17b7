//! Iteratively reweighted norm weights.

use crate::error::Result;
use crate::qvec::QVector;
use crate::tv::diff::DifferenceStack;

/// Diagonal weights `w_i = (sum_b |[D_b x]_i|^2 + eps^2)^(-1/4)`, repeated
/// once per difference block on the stacked operator. With vanishing `eps`
/// the reweighted quadratic `||W D x||_2^2` reproduces the total variation
/// of `x`, which is what makes the IRN outer iteration work.
#[derive(Clone, Debug)]
pub struct IrnWeights {
    values: Vec<f64>,
    eps: f64,
}

impl IrnWeights {
    /// Unit weights (the first IRN sweep).
    pub fn identity(block_rows: usize) -> Self {
        IrnWeights {
            values: vec![1.0; block_rows],
            eps: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scales a stacked vector `[u_1; u_2; ...]` by `diag(w, w, ...)`.
    pub fn scale_stacked(&self, u: &mut QVector) {
        let rows = self.values.len();
        debug_assert_eq!(u.len() % rows, 0);
        let blocks = u.len() / rows;
        for c in 0..4 {
            let plane = u.component_mut(c);
            for b in 0..blocks {
                for i in 0..rows {
                    plane[b * rows + i] *= self.values[i];
                }
            }
        }
    }

    /// `||W D x||_2^2` for diagnostics and tests.
    pub fn reweighted_norm_sq(&self, stack: &DifferenceStack, x: &QVector) -> Result<f64> {
        let mut u = stack.apply(x)?;
        self.scale_stacked(&mut u);
        Ok(u.norm2().powi(2))
    }
}

/// Builds the IRN weights of `x` with smoothing floor `eps_irn` (keeps the
/// weight finite on flat regions, where the gradient vanishes).
pub fn build_weights(x: &QVector, stack: &DifferenceStack, eps_irn: f64) -> Result<IrnWeights> {
    let mags = stack.gradient_magnitudes(x)?;
    let values = mags
        .iter()
        .map(|g| (g * g + eps_irn * eps_irn).powf(-0.25))
        .collect();
    Ok(IrnWeights {
        values,
        eps: eps_irn,
    })
}
