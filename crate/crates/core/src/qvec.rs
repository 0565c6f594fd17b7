//! Quaternion vectors stored as four parallel real arrays.

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// A quaternion vector in `Q^n`, stored component-planar (struct of arrays)
/// so real kernels can run on each of the four parts.
///
/// `Q^n` is treated as a *right* quaternionic Hilbert space: scalars multiply
/// vectors from the right (`v * alpha`), and the inner product
/// `<w, v> = sum_i conj(v_i) w_i` is right-linear in its first argument.
#[derive(Clone, Debug, PartialEq)]
pub struct QVector {
    w: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl QVector {
    pub fn zeros(n: usize) -> Self {
        QVector {
            w: vec![0.0; n],
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn from_parts(w: Vec<f64>, x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if w.len() != x.len() || w.len() != y.len() || w.len() != z.len() {
            return Err(Error::dimension("component arrays differ in length"));
        }
        Ok(QVector { w, x, y, z })
    }

    pub fn from_quaternions(entries: &[Quaternion]) -> Self {
        let mut v = QVector::zeros(entries.len());
        for (i, q) in entries.iter().enumerate() {
            v.set(i, *q);
        }
        v
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> Quaternion) -> Self {
        let mut v = QVector::zeros(n);
        for i in 0..n {
            v.set(i, f(i));
        }
        v
    }

    /// All-ones real vector (each entry `1 + 0i + 0j + 0k`).
    pub fn ones(n: usize) -> Self {
        QVector::from_fn(n, |_| Quaternion::ONE)
    }

    /// Standard basis vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = QVector::zeros(n);
        v.set(i, Quaternion::ONE);
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Quaternion {
        Quaternion::new(self.w[i], self.x[i], self.y[i], self.z[i])
    }

    #[inline]
    pub fn set(&mut self, i: usize, q: Quaternion) {
        self.w[i] = q.w;
        self.x[i] = q.x;
        self.y[i] = q.y;
        self.z[i] = q.z;
    }

    pub fn iter(&self) -> impl Iterator<Item = Quaternion> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Component plane `c` (0 = real, 1..3 = i, j, k coefficients).
    pub fn component(&self, c: usize) -> &[f64] {
        match c {
            0 => &self.w,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("component index {c} out of range"),
        }
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        match c {
            0 => &mut self.w,
            1 => &mut self.x,
            2 => &mut self.y,
            3 => &mut self.z,
            _ => panic!("component index {c} out of range"),
        }
    }

    /// All four component planes, mutably.
    pub fn components_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64], &mut [f64]) {
        (&mut self.w, &mut self.x, &mut self.y, &mut self.z)
    }

    /// Euclidean norm `(sum |v_i|^2)^(1/2)`.
    pub fn norm2(&self) -> f64 {
        let mut s = 0.0;
        for c in 0..4 {
            for &t in self.component(c) {
                s += t * t;
            }
        }
        s.sqrt()
    }

    /// p-norm `(sum |v_i|^p)^(1/p)` for `p >= 1`.
    pub fn norm_p(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p-norm requires p >= 1, got {p}"
            )));
        }
        if p == 2.0 {
            return Ok(self.norm2());
        }
        let mut s = 0.0;
        for i in 0..self.len() {
            s += self.get(i).norm().powf(p);
        }
        Ok(s.powf(1.0 / p))
    }

    /// Inner product `<self, v> = sum_i conj(v_i) self_i`.
    ///
    /// Right-linear in `self`: `<self * a, v> = <self, v> * a`.
    pub fn inner(&self, v: &QVector) -> Result<Quaternion> {
        if self.len() != v.len() {
            return Err(Error::dimension(format!(
                "inner product of lengths {} and {}",
                self.len(),
                v.len()
            )));
        }
        let (aw, ax, ay, az) = (&self.w, &self.x, &self.y, &self.z);
        let (bw, bx, by, bz) = (&v.w, &v.x, &v.y, &v.z);
        let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..self.len() {
            // conj(v_i) * self_i expanded over components.
            let (b0, b1, b2, b3) = (bw[i], -bx[i], -by[i], -bz[i]);
            let (a0, a1, a2, a3) = (aw[i], ax[i], ay[i], az[i]);
            s0 += b0 * a0 - b1 * a1 - b2 * a2 - b3 * a3;
            s1 += b0 * a1 + b1 * a0 + b2 * a3 - b3 * a2;
            s2 += b0 * a2 - b1 * a3 + b2 * a0 + b3 * a1;
            s3 += b0 * a3 + b1 * a2 - b2 * a1 + b3 * a0;
        }
        Ok(Quaternion::new(s0, s1, s2, s3))
    }

    pub fn add(&self, v: &QVector) -> Result<QVector> {
        if self.len() != v.len() {
            return Err(Error::dimension("vector addition length mismatch"));
        }
        let mut out = self.clone();
        for c in 0..4 {
            let o = out.component_mut(c);
            let b = v.component(c);
            for i in 0..o.len() {
                o[i] += b[i];
            }
        }
        Ok(out)
    }

    pub fn sub(&self, v: &QVector) -> Result<QVector> {
        if self.len() != v.len() {
            return Err(Error::dimension("vector subtraction length mismatch"));
        }
        let mut out = self.clone();
        for c in 0..4 {
            let o = out.component_mut(c);
            let b = v.component(c);
            for i in 0..o.len() {
                o[i] -= b[i];
            }
        }
        Ok(out)
    }

    pub fn scale_real(&mut self, s: f64) {
        for c in 0..4 {
            for t in self.component_mut(c) {
                *t *= s;
            }
        }
    }

    pub fn scaled_real(&self, s: f64) -> QVector {
        let mut v = self.clone();
        v.scale_real(s);
        v
    }

    /// Right scalar multiplication `self * a` applied in place.
    pub fn scale_right(&mut self, a: Quaternion) {
        let (a0, a1, a2, a3) = (a.w, a.x, a.y, a.z);
        for i in 0..self.len() {
            let (b0, b1, b2, b3) = (self.w[i], self.x[i], self.y[i], self.z[i]);
            self.w[i] = b0 * a0 - b1 * a1 - b2 * a2 - b3 * a3;
            self.x[i] = b0 * a1 + b1 * a0 + b2 * a3 - b3 * a2;
            self.y[i] = b0 * a2 - b1 * a3 + b2 * a0 + b3 * a1;
            self.z[i] = b0 * a3 + b1 * a2 - b2 * a1 + b3 * a0;
        }
    }

    pub fn scaled_right(&self, a: Quaternion) -> QVector {
        let mut v = self.clone();
        v.scale_right(a);
        v
    }

    /// `self += v * a` (right scalar multiplication of `v`).
    pub fn axpy_right(&mut self, a: Quaternion, v: &QVector) {
        debug_assert_eq!(self.len(), v.len());
        let (a0, a1, a2, a3) = (a.w, a.x, a.y, a.z);
        for i in 0..self.len() {
            let (b0, b1, b2, b3) = (v.w[i], v.x[i], v.y[i], v.z[i]);
            self.w[i] += b0 * a0 - b1 * a1 - b2 * a2 - b3 * a3;
            self.x[i] += b0 * a1 + b1 * a0 + b2 * a3 - b3 * a2;
            self.y[i] += b0 * a2 - b1 * a3 + b2 * a0 + b3 * a1;
            self.z[i] += b0 * a3 + b1 * a2 - b2 * a1 + b3 * a0;
        }
    }

    /// `self -= v * a`.
    pub fn sub_scaled_right(&mut self, a: Quaternion, v: &QVector) {
        self.axpy_right(-a, v);
    }

    /// Entrywise mean, one quaternion.
    pub fn mean(&self) -> Quaternion {
        if self.is_empty() {
            return Quaternion::ZERO;
        }
        let n = self.len() as f64;
        let mut s = Quaternion::ZERO;
        for i in 0..self.len() {
            s += self.get(i);
        }
        s.scale(1.0 / n)
    }

    /// Right linear combination `sum_i cols[i] * coeffs[i]`.
    pub fn combine(cols: &[QVector], coeffs: &[Quaternion]) -> Result<QVector> {
        if cols.len() < coeffs.len() {
            return Err(Error::dimension("fewer columns than coefficients"));
        }
        if coeffs.is_empty() {
            return Err(Error::dimension("empty linear combination"));
        }
        let mut out = QVector::zeros(cols[0].len());
        for (v, &a) in cols.iter().zip(coeffs.iter()) {
            out.axpy_right(a, v);
        }
        Ok(out)
    }
}

/// Inner product `<w, v> = sum_i conj(v_i) w_i` (function form).
pub fn inner(w: &QVector, v: &QVector) -> Result<Quaternion> {
    w.inner(v)
}

/// p-norm of a quaternion vector (function form).
pub fn vnorm(v: &QVector, p: f64) -> Result<f64> {
    v.norm_p(p)
}
