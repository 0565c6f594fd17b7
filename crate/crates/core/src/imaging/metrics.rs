//! Restoration quality criteria: PSNR, SNR, and SSIM.

use crate::error::{Error, Result};
use crate::imaging::color::ColorImage;

fn check_dims(a: &ColorImage, b: &ColorImage) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::dimension("images differ in size"));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB with unit peak, MSE averaged over the
/// three channels. Identical images report `f64::INFINITY`.
pub fn psnr(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    check_dims(reference, test)?;
    let n = reference.height() * reference.width();
    let mut se = 0.0;
    for c in 0..3 {
        for (a, b) in reference.channel(c).iter().zip(test.channel(c)) {
            se += (a - b) * (a - b);
        }
    }
    let mse = se / (3 * n) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Signal-to-noise ratio in dB: signal power about the per-channel mean of
/// the reference against the error power.
pub fn snr(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    check_dims(reference, test)?;
    let n = (reference.height() * reference.width()) as f64;
    let mut signal = 0.0;
    let mut noise = 0.0;
    for c in 0..3 {
        let mean: f64 = reference.channel(c).iter().sum::<f64>() / n;
        for (a, b) in reference.channel(c).iter().zip(test.channel(c)) {
            signal += (a - mean) * (a - mean);
            noise += (a - b) * (a - b);
        }
    }
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5, K1 = 0.01,
/// K2 = 0.03, unit dynamic range), averaged over the three channels. The
/// window is truncated and renormalized at the borders.
pub fn ssim(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    check_dims(reference, test)?;
    let (h, w) = (reference.height(), reference.width());
    let half = (SSIM_WINDOW / 2) as isize;
    let mut kernel = [[0.0; SSIM_WINDOW]; SSIM_WINDOW];
    for di in -half..=half {
        for dj in -half..=half {
            kernel[(di + half) as usize][(dj + half) as usize] =
                (-((di * di + dj * dj) as f64) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        }
    }
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;

    let mut total = 0.0;
    for ch in 0..3 {
        let mut acc = 0.0;
        for row in 0..h as isize {
            for col in 0..w as isize {
                let (mut sw, mut mx, mut my) = (0.0, 0.0, 0.0);
                let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
                for di in -half..=half {
                    for dj in -half..=half {
                        let (r, c) = (row + di, col + dj);
                        if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                            continue;
                        }
                        let k = kernel[(di + half) as usize][(dj + half) as usize];
                        let a = reference.get(ch, r as usize, c as usize);
                        let b = test.get(ch, r as usize, c as usize);
                        sw += k;
                        mx += k * a;
                        my += k * b;
                        sxx += k * a * a;
                        syy += k * b * b;
                        sxy += k * a * b;
                    }
                }
                mx /= sw;
                my /= sw;
                let vx = (sxx / sw - mx * mx).max(0.0);
                let vy = (syy / sw - my * my).max(0.0);
                let cov = sxy / sw - mx * my;
                let s = ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                acc += s;
            }
        }
        total += acc / (h * w) as f64;
    }
    Ok(total / 3.0)
}
