//! Collaborative norms over (color, derivative, pixel) gradient tensors and
//! the channel-splitting map between quaternion vectors and real `N x 4`
//! matrices.

use crate::error::{Error, Result};
use crate::linalg::RealMat;
use crate::qvec::QVector;
use crate::tv::diff::DifferenceStack;

/// Splits a quaternion vector into its four real channel columns
/// (real part, then the i/j/k coefficients; for color data these are the
/// red, green, blue planes). A linear bijection onto its image.
pub fn psi_map(x: &QVector) -> RealMat {
    RealMat::from_fn(x.len(), 4, |i, c| x.component(c)[i])
}

/// Inverse of [`psi_map`].
pub fn psi_inverse(m: &RealMat) -> Result<QVector> {
    if m.ncols() != 4 {
        return Err(Error::dimension("channel matrix must have four columns"));
    }
    QVector::from_parts(
        m.col(0).to_vec(),
        m.col(1).to_vec(),
        m.col(2).to_vec(),
        m.col(3).to_vec(),
    )
}

/// Gradient tensor with axes (pixel, derivative, channel).
#[derive(Clone, Debug)]
pub struct GradientTensor {
    n_pixels: usize,
    n_derivatives: usize,
    n_channels: usize,
    /// Indexed `[(pix * n_derivatives + der) * n_channels + chan]`.
    data: Vec<f64>,
}

impl GradientTensor {
    pub fn new(n_pixels: usize, n_derivatives: usize, n_channels: usize) -> Self {
        GradientTensor {
            n_pixels,
            n_derivatives,
            n_channels,
            data: vec![0.0; n_pixels * n_derivatives * n_channels],
        }
    }

    #[inline]
    pub fn get(&self, pix: usize, der: usize, chan: usize) -> f64 {
        self.data[(pix * self.n_derivatives + der) * self.n_channels + chan]
    }

    #[inline]
    pub fn set(&mut self, pix: usize, der: usize, chan: usize, v: f64) {
        self.data[(pix * self.n_derivatives + der) * self.n_channels + chan] = v;
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_pixels, self.n_derivatives, self.n_channels)
    }
}

/// Applies the difference stack to each channel of `psi(x)`:
/// `tensor[i, d, c] = [D_d x^c]_i`.
pub fn gradient_tensor(stack: &DifferenceStack, x: &QVector) -> Result<GradientTensor> {
    let d = stack.apply(x)?;
    let rows = stack.block_rows();
    let mut t = GradientTensor::new(rows, stack.num_blocks(), 4);
    for der in 0..stack.num_blocks() {
        for c in 0..4 {
            let plane = d.component(c);
            for i in 0..rows {
                t.set(i, der, c, plane[der * rows + i]);
            }
        }
    }
    Ok(t)
}

/// Nested `l^{p,q,r}` norm over (channel, derivative, pixel), evaluated
/// inside-out: the `l^p` norm across channels, then `l^q` across
/// derivatives, then `l^r` across pixels.
pub fn ctv_norm(t: &GradientTensor, p: f64, q: f64, r: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if !(v >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "collaborative norm exponent {name} must be >= 1, got {v}"
            )));
        }
    }
    let (npix, nder, nchan) = t.shape();
    let mut outer = 0.0;
    for i in 0..npix {
        let mut mid = 0.0;
        for d in 0..nder {
            let mut inner = 0.0;
            for c in 0..nchan {
                inner += t.get(i, d, c).abs().powf(p);
            }
            mid += inner.powf(q / p);
        }
        outer += mid.powf(r / q);
    }
    Ok(outer.powf(1.0 / r))
}
