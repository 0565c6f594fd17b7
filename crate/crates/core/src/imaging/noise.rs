//! Additive Gaussian noise on the color channels.

use crate::error::{Error, Result};
use crate::qvec::QVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Adds i.i.d. zero-mean Gaussian noise of standard deviation `sigma` to the
/// three imaginary components (the color channels) of each entry; the real
/// part is untouched. Deterministic for a fixed seed; `sigma = 0` returns
/// the input bit-identically.
pub fn add_gaussian_noise(x: &QVector, sigma: f64, seed: u64) -> Result<QVector> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(
            "noise sigma must be nonnegative".into(),
        ));
    }
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParameter(format!("normal distribution: {e}")))?;
    let mut out = x.clone();
    for c in 1..4 {
        for v in out.component_mut(c) {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    #[test]
    fn zero_sigma_is_identity() {
        let x = QVector::from_fn(10, |i| Quaternion::pure(i as f64, 0.5, -0.25));
        let y = add_gaussian_noise(&x, 0.0, 7).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let x = QVector::zeros(100);
        let a = add_gaussian_noise(&x, 0.1, 42).unwrap();
        let b = add_gaussian_noise(&x, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let c = add_gaussian_noise(&x, 0.1, 43).unwrap();
        assert!(a != c);
    }

    #[test]
    fn real_part_is_untouched() {
        let x = QVector::from_fn(50, |i| Quaternion::new(i as f64, 0.0, 0.0, 0.0));
        let y = add_gaussian_noise(&x, 0.3, 1).unwrap();
        for i in 0..50 {
            assert_eq!(y.get(i).w, i as f64);
        }
    }

    #[test]
    fn empirical_standard_deviation_matches() {
        let n = 40_000; // 3 channels -> 120k samples
        let x = QVector::zeros(n);
        let sigma = 0.25;
        let y = add_gaussian_noise(&x, sigma, 5).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for c in 1..4 {
            for v in y.component(c) {
                sum += v * v;
                count += 1;
            }
        }
        let emp = (sum / count as f64).sqrt();
        assert!(
            (emp - sigma).abs() / sigma < 0.02,
            "empirical sigma {emp} vs {sigma}"
        );
    }
}
