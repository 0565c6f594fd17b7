//! Deterministic synthetic test scenes and waveforms.

use crate::imaging::color::ColorImage;
use crate::quat::Quaternion;
use crate::qvec::QVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Built-in piecewise-constant test scenes (unit-scale RGB).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StockImage {
    /// Colored disks on a dark background.
    Blobs,
    /// Axis-aligned color blocks.
    Blocks,
    /// Concentric rings.
    Rings,
    /// Diagonal bands.
    Stripes,
}

impl StockImage {
    pub const ALL: [StockImage; 4] = [
        StockImage::Blobs,
        StockImage::Blocks,
        StockImage::Rings,
        StockImage::Stripes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StockImage::Blobs => "blobs",
            StockImage::Blocks => "blocks",
            StockImage::Rings => "rings",
            StockImage::Stripes => "stripes",
        }
    }
}

/// Renders a stock scene at `size x size`. Purely formula-driven, so a given
/// (kind, size) pair is always the same image.
pub fn stock_image(kind: StockImage, size: usize) -> ColorImage {
    let s = size as f64;
    match kind {
        StockImage::Blobs => {
            let disks = [
                (0.30, 0.30, 0.22, [0.85, 0.15, 0.10]),
                (0.70, 0.40, 0.18, [0.10, 0.70, 0.20]),
                (0.45, 0.72, 0.16, [0.95, 0.85, 0.15]),
                (0.75, 0.78, 0.12, [0.20, 0.30, 0.90]),
            ];
            ColorImage::from_fn(size, size, |r, c| {
                let (y, x) = (r as f64 / s, c as f64 / s);
                let mut px = [0.12, 0.10, 0.18];
                for (cy, cx, rad, col) in disks {
                    if (y - cy).powi(2) + (x - cx).powi(2) <= rad * rad {
                        px = col;
                    }
                }
                px
            })
        }
        StockImage::Blocks => {
            let palette = [
                [0.90, 0.20, 0.20],
                [0.20, 0.75, 0.25],
                [0.20, 0.30, 0.85],
                [0.92, 0.90, 0.25],
                [0.60, 0.25, 0.70],
                [0.95, 0.95, 0.92],
                [0.10, 0.10, 0.12],
                [0.25, 0.75, 0.75],
                [0.80, 0.50, 0.20],
            ];
            ColorImage::from_fn(size, size, |r, c| {
                let br = (3 * r) / size.max(1);
                let bc = (3 * c) / size.max(1);
                palette[(3 * br + bc).min(8)]
            })
        }
        StockImage::Rings => ColorImage::from_fn(size, size, |r, c| {
            let (y, x) = (r as f64 / s - 0.5, c as f64 / s - 0.5);
            let d = (x * x + y * y).sqrt();
            let band = (d * 5.0).floor() as usize;
            match band % 4 {
                0 => [0.95, 0.55, 0.15],
                1 => [0.15, 0.25, 0.55],
                2 => [0.85, 0.85, 0.80],
                _ => [0.30, 0.60, 0.30],
            }
        }),
        StockImage::Stripes => ColorImage::from_fn(size, size, |r, c| {
            let t = (r + 2 * c) as f64 / s;
            match (t * 1.8).floor() as usize % 4 {
                0 => [0.85, 0.20, 0.45],
                1 => [0.95, 0.90, 0.30],
                2 => [0.15, 0.55, 0.80],
                _ => [0.25, 0.20, 0.25],
            }
        }),
    }
}

/// A pure-quaternion 3-D signal: per channel a sum of sinusoids with
/// seed-controlled phases, offset so the leading sample stays away from
/// zero (keeps the square filter system nonsingular).
pub fn synthetic_rgb_signal(len: usize, seed: u64) -> QVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases: Vec<f64> = (0..9)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    QVector::from_fn(len, |t| {
        let u = t as f64 / len as f64;
        let chan = |base: usize, off: f64| -> f64 {
            off + 0.5 * (std::f64::consts::TAU * 2.0 * u + phases[base]).sin()
                + 0.3 * (std::f64::consts::TAU * 5.0 * u + phases[base + 1]).sin()
                + 0.2 * (std::f64::consts::TAU * 11.0 * u + phases[base + 2]).cos()
        };
        Quaternion::pure(chan(0, 1.2), chan(3, 1.0), chan(6, 0.8))
    })
}

/// A piecewise-constant quaternion filter: a few flat segments per channel.
pub fn piecewise_filter(len: usize, seed: u64) -> QVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let segments = 4.max(len / 8);
    let mut levels: Vec<Quaternion> = Vec::with_capacity(segments);
    for _ in 0..segments {
        levels.push(Quaternion::pure(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        ));
    }
    QVector::from_fn(len, |i| levels[(i * segments) / len.max(1)])
}
