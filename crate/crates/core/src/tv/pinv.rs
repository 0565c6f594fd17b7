//! Minimum-norm application of the pseudoinverse of the weighted stack
//! `P = W D` without forming any dense factorization.

use crate::error::{Error, Result};
use crate::qvec::QVector;
use crate::tv::diff::DifferenceStack;
use crate::tv::weights::IrnWeights;

/// Inner-solve parameters for the normal-equation conjugate gradient.
#[derive(Clone, Debug)]
pub struct PinvConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PinvConfig {
    fn default() -> Self {
        PinvConfig {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// The weighted difference stack `P = diag(W, W, ...) * D`.
pub struct WeightedStack<'a> {
    stack: &'a DifferenceStack,
    weights: &'a IrnWeights,
}

impl<'a> WeightedStack<'a> {
    pub fn new(stack: &'a DifferenceStack, weights: &'a IrnWeights) -> Result<Self> {
        if weights.len() != stack.block_rows() {
            return Err(Error::dimension("weights do not match the stack rows"));
        }
        Ok(WeightedStack { stack, weights })
    }

    /// `P x` (stacked, length `num_blocks * Ntilde`).
    pub fn apply(&self, x: &QVector) -> Result<QVector> {
        let mut u = self.stack.apply(x)?;
        self.weights.scale_stacked(&mut u);
        Ok(u)
    }

    /// `P^T u`.
    pub fn apply_transpose(&self, u: &QVector) -> Result<QVector> {
        let mut s = u.clone();
        self.weights.scale_stacked(&mut s);
        self.stack.apply_transpose(&s)
    }

    /// Minimum-norm least-squares solution of `min_z ||P z - v||_2`.
    ///
    /// `P` is real, so the four quaternion components decouple into four
    /// real problems solved by Jacobi-preconditioned conjugate gradients on
    /// the normal equations `D^T W^2 D z = D^T W v`; the null-space
    /// (constant) component is removed so the result is the pseudoinverse
    /// image of `v`.
    pub fn pinv_apply(&self, v: &QVector, cfg: &PinvConfig) -> Result<QVector> {
        if v.len() != self.stack.stacked_rows() {
            return Err(Error::dimension(format!(
                "pseudoinverse rhs must have stacked length {}, got {}",
                self.stack.stacked_rows(),
                v.len()
            )));
        }
        let n = self.stack.n_values();
        let rows = self.stack.block_rows();
        let blocks = self.stack.num_blocks();

        // Per-row squared weights of the stacked operator.
        let w2: Vec<f64> = self.weights.values().iter().map(|w| w * w).collect();

        // Jacobi preconditioner: diagonal of D^T W^2 D summed over blocks.
        let mut diag = vec![0.0; n];
        for b in 0..blocks {
            let d = self.stack.block(b).normal_diag_scaled(&w2);
            for (t, v) in diag.iter_mut().zip(&d) {
                *t += v;
            }
        }
        for d in diag.iter_mut() {
            if *d <= 0.0 {
                *d = 1.0;
            }
        }

        let mut out = QVector::zeros(n);
        for c in 0..4 {
            // rhs = D^T W (v_c) restricted to this component.
            let vc = v.component(c);
            let mut rhs = vec![0.0; n];
            for b in 0..blocks {
                let seg: Vec<f64> = vc[b * rows..(b + 1) * rows]
                    .iter()
                    .zip(self.weights.values())
                    .map(|(u, w)| u * w)
                    .collect();
                let t = self.stack.block(b).matvec_transpose(&seg);
                for (r, v) in rhs.iter_mut().zip(&t) {
                    *r += v;
                }
            }
            let z = self.cg_normal(&rhs, &w2, &diag, cfg);
            out.component_mut(c).copy_from_slice(&z);
        }

        // Null-space hygiene: remove the constant component per channel.
        for c in 0..4 {
            let plane = out.component_mut(c);
            let mean = plane.iter().sum::<f64>() / plane.len() as f64;
            for t in plane.iter_mut() {
                *t -= mean;
            }
        }
        Ok(out)
    }

    /// PCG on `D^T W^2 D z = rhs` for one real component.
    fn cg_normal(&self, rhs: &[f64], w2: &[f64], diag: &[f64], cfg: &PinvConfig) -> Vec<f64> {
        let n = rhs.len();
        let rows = self.stack.block_rows();
        let blocks = self.stack.num_blocks();
        let matvec = |z: &[f64]| -> Vec<f64> {
            let mut y = vec![0.0; n];
            for b in 0..blocks {
                let mut t = self.stack.block(b).matvec(z);
                for (ti, w) in t.iter_mut().zip(w2) {
                    *ti *= w;
                }
                debug_assert_eq!(t.len(), rows);
                let back = self.stack.block(b).matvec_transpose(&t);
                for (yi, v) in y.iter_mut().zip(&back) {
                    *yi += v;
                }
            }
            y
        };

        let rhs_norm = rhs.iter().map(|t| t * t).sum::<f64>().sqrt();
        if rhs_norm == 0.0 {
            return vec![0.0; n];
        }
        let mut z = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut precond: Vec<f64> = r.iter().zip(diag).map(|(ri, d)| ri / d).collect();
        let mut p = precond.clone();
        let mut rz: f64 = r.iter().zip(&precond).map(|(a, b)| a * b).sum();
        for _ in 0..cfg.max_iter {
            let ap = matvec(&p);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                z[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rnorm = r.iter().map(|t| t * t).sum::<f64>().sqrt();
            if rnorm <= cfg.tol * rhs_norm {
                break;
            }
            for i in 0..n {
                precond[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&precond).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = precond[i] + beta * p[i];
            }
        }
        z
    }
}

/// Minimum-norm least-squares solve `min_z ||(W D) z - v||` with default
/// inner tolerances (function form).
pub fn apply_p_pinv(stack: &DifferenceStack, weights: &IrnWeights, v: &QVector) -> Result<QVector> {
    WeightedStack::new(stack, weights)?.pinv_apply(v, &PinvConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use crate::tv::weights::build_weights;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pure(rng: &mut ChaCha8Rng, n: usize) -> QVector {
        QVector::from_fn(n, |_| {
            Quaternion::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
        })
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let stack = DifferenceStack::image(4).unwrap();
        let w = IrnWeights::identity(stack.block_rows());
        let z = apply_p_pinv(&stack, &w, &QVector::zeros(stack.stacked_rows())).unwrap();
        assert_eq!(z.norm2(), 0.0);
    }

    #[test]
    fn recovers_mean_free_preimage() {
        let mut rng = ChaCha8Rng::seed_from_u64(111);
        let n = 6;
        let stack = DifferenceStack::image(n).unwrap();
        let x = random_pure(&mut rng, n * n);
        let w = build_weights(&x, &stack, 1e-6).unwrap();
        let p = WeightedStack::new(&stack, &w).unwrap();

        // z0 orthogonal to the null space: remove per-channel means.
        let mut z0 = random_pure(&mut rng, n * n);
        for c in 0..4 {
            let plane = z0.component_mut(c);
            let mean = plane.iter().sum::<f64>() / plane.len() as f64;
            for t in plane.iter_mut() {
                *t -= mean;
            }
        }
        let v = p.apply(&z0).unwrap();
        let z = p.pinv_apply(&v, &PinvConfig::default()).unwrap();
        assert!(
            z.sub(&z0).unwrap().norm2() <= 1e-8 * z0.norm2().max(1.0),
            "recovery error {}",
            z.sub(&z0).unwrap().norm2()
        );
    }

    #[test]
    fn projector_property_on_random_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(112);
        let n = 5;
        let stack = DifferenceStack::image(n).unwrap();
        let w = IrnWeights::identity(stack.block_rows());
        let p = WeightedStack::new(&stack, &w).unwrap();
        // P^dagger P acts as identity on the mean-free complement.
        let mut probe = random_pure(&mut rng, n * n);
        for c in 0..4 {
            let plane = probe.component_mut(c);
            let mean = plane.iter().sum::<f64>() / plane.len() as f64;
            for t in plane.iter_mut() {
                *t -= mean;
            }
        }
        let z = p
            .pinv_apply(&p.apply(&probe).unwrap(), &PinvConfig::default())
            .unwrap();
        assert!(z.sub(&probe).unwrap().norm2() <= 1e-8 * probe.norm2());
    }

    #[test]
    fn output_is_mean_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let stack = DifferenceStack::signal(20).unwrap();
        let w = IrnWeights::identity(stack.block_rows());
        let p = WeightedStack::new(&stack, &w).unwrap();
        let v = random_pure(&mut rng, stack.stacked_rows());
        let z = p.pinv_apply(&v, &PinvConfig::default()).unwrap();
        for c in 0..4 {
            let mean: f64 = z.component(c).iter().sum::<f64>() / z.len() as f64;
            assert!(mean.abs() < 1e-12);
        }
    }
}
