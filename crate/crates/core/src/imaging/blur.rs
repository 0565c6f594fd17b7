//! Spatially invariant blur operators as sparse quaternion matrices.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BlurKind {
    Gaussian,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Boundary {
    Zero,
    Periodic,
    Reflexive,
}

/// Point-spread-function model: a normalized `size x size` Gaussian stencil
/// applied with the chosen boundary rule.
#[derive(Clone, Debug)]
pub struct BlurModel {
    pub kind: BlurKind,
    /// PSF side length (odd).
    pub size: usize,
    pub sigma: f64,
    pub boundary: Boundary,
}

impl Default for BlurModel {
    fn default() -> Self {
        BlurModel {
            kind: BlurKind::Gaussian,
            size: 3,
            sigma: 0.8,
            boundary: Boundary::Periodic,
        }
    }
}

impl BlurModel {
    /// The normalized PSF stencil, centered.
    pub fn psf(&self) -> Result<Vec<Vec<f64>>> {
        if self.size == 0 || self.size % 2 == 0 {
            return Err(Error::InvalidParameter("PSF side must be odd".into()));
        }
        if self.size > 1 && !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter("PSF sigma must be positive".into()));
        }
        let half = (self.size / 2) as isize;
        let mut k = vec![vec![0.0; self.size]; self.size];
        let mut sum = 0.0;
        for di in -half..=half {
            for dj in -half..=half {
                let v = match self.kind {
                    BlurKind::Gaussian => {
                        (-((di * di + dj * dj) as f64) / (2.0 * self.sigma * self.sigma)).exp()
                    }
                };
                k[(di + half) as usize][(dj + half) as usize] = v;
                sum += v;
            }
        }
        for row in k.iter_mut() {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        Ok(k)
    }
}

fn map_index(i: isize, n: isize, boundary: Boundary) -> Option<usize> {
    if (0..n).contains(&i) {
        return Some(i as usize);
    }
    match boundary {
        Boundary::Zero => None,
        Boundary::Periodic => Some(i.rem_euclid(n) as usize),
        Boundary::Reflexive => {
            let mut t = i;
            // Reflect (without edge repeat avoidance) until inside.
            loop {
                if t < 0 {
                    t = -t - 1;
                } else if t >= n {
                    t = 2 * n - t - 1;
                } else {
                    return Some(t as usize);
                }
            }
        }
    }
}

/// Sparse real blur operator on a `height x width` image stacked
/// column-major; as a quaternion matrix it has zero imaginary parts, so it
/// acts channel-wise and maps pure-quaternion images to pure-quaternion
/// images.
pub fn build_blur_operator(model: &BlurModel, height: usize, width: usize) -> Result<QMatrix> {
    if model.size > height || model.size > width {
        return Err(Error::InvalidParameter(
            "PSF does not fit inside the image".into(),
        ));
    }
    let psf = model.psf()?;
    let half = (model.size / 2) as isize;
    let n = height * width;
    let mut trip: Vec<(usize, usize, Quaternion)> = Vec::with_capacity(n * model.size * model.size);
    for col in 0..width {
        for row in 0..height {
            let out_idx = col * height + row;
            for di in -half..=half {
                for dj in -half..=half {
                    let v = psf[(di + half) as usize][(dj + half) as usize];
                    if v == 0.0 {
                        continue;
                    }
                    let (Some(r), Some(c)) = (
                        map_index(row as isize - di, height as isize, model.boundary),
                        map_index(col as isize - dj, width as isize, model.boundary),
                    ) else {
                        continue;
                    };
                    trip.push((out_idx, c * height + r, Quaternion::from_real(v)));
                }
            }
        }
    }
    QMatrix::from_triplets(n, n, &trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::color::{image_to_qvec, ColorImage};
    use crate::qvec::QVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_psf_gives_identity_operator() {
        let model = BlurModel {
            size: 1,
            sigma: 1.0,
            ..Default::default()
        };
        let a = build_blur_operator(&model, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(141);
        let x = QVector::from_fn(9, |_| {
            crate::quat::Quaternion::pure(rng.random(), rng.random(), rng.random())
        });
        let y = a.matvec(&x).unwrap();
        assert!(y.sub(&x).unwrap().norm2() < 1e-14);
    }

    #[test]
    fn periodic_blur_preserves_constants() {
        let model = BlurModel {
            size: 3,
            sigma: 1.0,
            boundary: Boundary::Periodic,
            ..Default::default()
        };
        let a = build_blur_operator(&model, 4, 4).unwrap();
        let img = ColorImage::from_fn(4, 4, |_, _| [0.25, 0.5, 0.75]);
        let x = image_to_qvec(&img);
        let y = a.matvec(&x).unwrap();
        assert!(y.sub(&x).unwrap().norm2() < 1e-12);
    }

    #[test]
    fn matches_direct_convolution_on_random_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(142);
        let (h, w) = (6, 6);
        let img = ColorImage::from_fn(h, w, |_, _| [rng.random(), rng.random(), rng.random()]);
        for boundary in [Boundary::Zero, Boundary::Periodic, Boundary::Reflexive] {
            let model = BlurModel {
                size: 3,
                sigma: 0.8,
                boundary,
                ..Default::default()
            };
            let a = build_blur_operator(&model, h, w).unwrap();
            let y = a.matvec(&image_to_qvec(&img)).unwrap();
            let psf = model.psf().unwrap();
            // Direct convolution loop oracle.
            for col in 0..w {
                for row in 0..h {
                    for ch in 0..3 {
                        let mut s = 0.0;
                        for di in -1..=1_isize {
                            for dj in -1..=1_isize {
                                if let (Some(r), Some(c)) = (
                                    map_index(row as isize - di, h as isize, boundary),
                                    map_index(col as isize - dj, w as isize, boundary),
                                ) {
                                    s += psf[(di + 1) as usize][(dj + 1) as usize]
                                        * img.get(ch, r, c);
                                }
                            }
                        }
                        let got = y.get(col * h + row);
                        let got_c = [got.x, got.y, got.z][ch];
                        assert!((got_c - s).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn operator_keeps_real_part_zero_and_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(143);
        let model = BlurModel::default();
        let a = build_blur_operator(&model, 10, 10).unwrap();
        assert!(a.is_pure(0.0) == false); // real entries only
        let x = QVector::from_fn(100, |_| {
            crate::quat::Quaternion::pure(rng.random(), rng.random(), rng.random())
        });
        let y = a.matvec(&x).unwrap();
        for i in 0..y.len() {
            assert_eq!(y.get(i).w, 0.0);
        }
        // Linearity A(x + z) = Ax + Az.
        let z = QVector::from_fn(100, |_| {
            crate::quat::Quaternion::pure(rng.random(), rng.random(), rng.random())
        });
        let lhs = a.matvec(&x.add(&z).unwrap()).unwrap();
        let rhs = a.matvec(&x).unwrap().add(&a.matvec(&z).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm2() < 1e-12);
    }
}
