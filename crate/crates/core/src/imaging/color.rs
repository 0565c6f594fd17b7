//! RGB images and their pure-quaternion vector packing.

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::qvec::QVector;
use std::path::Path;

/// An RGB image with unit-scale floating channels.
///
/// Values may leave `[0, 1]` during computation; they are clamped only on
/// export. Planes are stored row-major (`idx = row * width + col`).
#[derive(Clone, Debug, PartialEq)]
pub struct ColorImage {
    height: usize,
    width: usize,
    channels: [Vec<f64>; 3],
}

impl ColorImage {
    pub fn new(height: usize, width: usize) -> Self {
        ColorImage {
            height,
            width,
            channels: std::array::from_fn(|_| vec![0.0; height * width]),
        }
    }

    pub fn from_channels(height: usize, width: usize, channels: [Vec<f64>; 3]) -> Result<Self> {
        for c in &channels {
            if c.len() != height * width {
                return Err(Error::dimension("channel plane size mismatch"));
            }
        }
        Ok(ColorImage {
            height,
            width,
            channels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    #[inline]
    pub fn get(&self, c: usize, row: usize, col: usize) -> f64 {
        self.channels[c][row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, c: usize, row: usize, col: usize, v: f64) {
        self.channels[c][row * self.width + col] = v;
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut img = ColorImage::new(height, width);
        for r in 0..height {
            for c in 0..width {
                let px = f(r, c);
                for ch in 0..3 {
                    img.set(ch, r, c, px[ch]);
                }
            }
        }
        img
    }

    /// Reads an 8-bit PNG (RGB, RGBA, or grayscale) into unit-scale channels.
    pub fn read_png(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let decoder = png::Decoder::new(std::io::BufReader::new(file));
        let mut reader = decoder
            .read_info()
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
        let info = reader
            .next_frame(&mut buf)
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        if info.bit_depth != png::BitDepth::Eight {
            return Err(Error::Format("only 8-bit PNGs are supported".into()));
        }
        let (w, h) = (info.width as usize, info.height as usize);
        let stride = match info.color_type {
            png::ColorType::Rgb => 3,
            png::ColorType::Rgba => 4,
            png::ColorType::Grayscale => 1,
            png::ColorType::GrayscaleAlpha => 2,
            other => {
                return Err(Error::Format(format!(
                    "unsupported PNG color type {other:?}"
                )))
            }
        };
        let mut img = ColorImage::new(h, w);
        for r in 0..h {
            for c in 0..w {
                let p = (r * w + c) * stride;
                let (red, green, blue) = match stride {
                    1 | 2 => (buf[p], buf[p], buf[p]),
                    _ => (buf[p], buf[p + 1], buf[p + 2]),
                };
                img.set(0, r, c, red as f64 / 255.0);
                img.set(1, r, c, green as f64 / 255.0);
                img.set(2, r, c, blue as f64 / 255.0);
            }
        }
        Ok(img)
    }

    /// Writes an 8-bit RGB PNG, clamping channels to `[0, 1]`.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut encoder = png::Encoder::new(
            std::io::BufWriter::new(file),
            self.width as u32,
            self.height as u32,
        );
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        let mut data = Vec::with_capacity(self.width * self.height * 3);
        for r in 0..self.height {
            for c in 0..self.width {
                for ch in 0..3 {
                    let v = self.get(ch, r, c).clamp(0.0, 1.0);
                    data.push((v * 255.0).round() as u8);
                }
            }
        }
        writer
            .write_image_data(&data)
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        Ok(())
    }
}

/// Packs an image into a pure-quaternion vector by stacking columns:
/// pixel `(row, col)` lands at index `col * height + row`, with the RGB
/// channels in the i/j/k components and zero real part.
pub fn image_to_qvec(img: &ColorImage) -> QVector {
    let (h, w) = (img.height, img.width);
    QVector::from_fn(h * w, |idx| {
        let col = idx / h;
        let row = idx % h;
        Quaternion::pure(
            img.get(0, row, col),
            img.get(1, row, col),
            img.get(2, row, col),
        )
    })
}

/// Inverse of [`image_to_qvec`]; the real component is discarded.
pub fn qvec_to_image(x: &QVector, height: usize, width: usize) -> Result<ColorImage> {
    if x.len() != height * width {
        return Err(Error::dimension(format!(
            "vector of length {} cannot fill a {height}x{width} image",
            x.len()
        )));
    }
    let mut img = ColorImage::new(height, width);
    for idx in 0..x.len() {
        let col = idx / height;
        let row = idx % height;
        let q = x.get(idx);
        img.set(0, row, col, q.x);
        img.set(1, row, col, q.y);
        img.set(2, row, col, q.z);
    }
    Ok(img)
}
