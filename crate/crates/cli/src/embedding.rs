//! Block-mean luminance embedding used as a stand-in face recognizer.

use radialkit::{Error, ImageBuffer, Result};

/// Side of the block grid; the embedding has `GRID * GRID` entries.
pub const GRID: usize = 8;

/// Standardized 8×8 block means of an image's luminance.
///
/// Values have zero mean and unit Euclidean norm. An image whose block means
/// are all equal has no direction; it maps to the zero vector with
/// `degenerate` set, and similarities against it are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyEmbedding {
    values: Vec<f64>,
    degenerate: bool,
}

impl ToyEmbedding {
    pub fn from_image(img: &ImageBuffer) -> Result<Self> {
        let (w, h) = (img.width(), img.height());
        if w < GRID || h < GRID {
            return Err(Error::DegenerateCrop(format!("{w}x{h} image is smaller than the {GRID}x{GRID} grid")));
        }
        let lum = img.luminance_plane();
        let mut values = Vec::with_capacity(GRID * GRID);
        for by in 0..GRID {
            let (y0, y1) = (by * h / GRID, (by + 1) * h / GRID);
            for bx in 0..GRID {
                let (x0, x1) = (bx * w / GRID, (bx + 1) * w / GRID);
                let sum: f64 = (y0..y1).flat_map(|y| lum[y * w + x0..y * w + x1].iter()).sum();
                values.push(sum / ((y1 - y0) * (x1 - x0)) as f64);
            }
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.iter_mut().for_each(|v| *v -= mean);
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        // block means are at most 255 apart, so anything this small is rounding noise
        if norm < 1e-9 {
            return Ok(Self {
                values: vec![0.0; GRID * GRID],
                degenerate: true,
            });
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(Self { values, degenerate: false })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Cosine similarity, or `None` if either side is degenerate.
    pub fn similarity(&self, other: &ToyEmbedding) -> Option<f64> {
        if self.degenerate || other.degenerate {
            return None;
        }
        let dot: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Some(dot.clamp(-1.0, 1.0))
    }
}
