use rayon::prelude::*;

use super::{Frame, ImageBuffer};
use crate::error::{Error, Result};
use crate::geometry::DistortionModel;

/// Which way a warp moves the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Output is the distorted image: each output pixel is a distorted-image
    /// point and samples the input at its undistorted location.
    SynthesizeDistortion,
    /// Output is the undistorted image: each output pixel samples the input
    /// at its distorted location.
    Rectify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Bilinear,
    Nearest,
}

/// How output pixels without a valid source sample are painted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    Constant(u8),
    /// Sample the nearest edge pixel. Pixels whose source is undefined
    /// (a transform domain error) are painted black.
    EdgeClamp,
}

impl Default for Fill {
    fn default() -> Self {
        Fill::Constant(0)
    }
}

/// Full recipe for one warp. Coordinates are always normalized by half the
/// image diagonal (see [`Frame`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpSpec {
    pub model: DistortionModel,
    pub direction: Direction,
    pub interpolation: Interpolation,
    pub fill: Fill,
}

impl WarpSpec {
    pub fn new(model: DistortionModel, direction: Direction) -> Self {
        Self {
            model,
            direction,
            interpolation: Interpolation::default(),
            fill: Fill::default(),
        }
    }

    pub fn synthesize(model: DistortionModel) -> Self {
        Self::new(model, Direction::SynthesizeDistortion)
    }

    pub fn rectify(model: DistortionModel) -> Self {
        Self::new(model, Direction::Rectify)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn with_fill(mut self, fill: Fill) -> Self {
        self.fill = fill;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()
    }

    /// Source pixel location for output pixel `(x, y)` of a `frame`-sized image.
    pub fn source_of(&self, frame: &Frame, x: f64, y: f64) -> SourceSample {
        let p = frame.to_norm(x, y);
        let mapped = match self.direction {
            Direction::SynthesizeDistortion => self.model.undistort(p),
            Direction::Rectify => self.model.distort(p),
        };
        match mapped {
            Ok(q) => {
                let (sx, sy) = frame.to_pixel(q);
                SourceSample::At { x: sx, y: sy }
            }
            Err(_) => SourceSample::Undefined,
        }
    }
}

/// Where an output pixel reads from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSample {
    At { x: f64, y: f64 },
    /// The transform is not defined at this pixel.
    Undefined,
}

/// Classification of an output pixel's source sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStatus {
    InBounds,
    OutOfBounds,
    DomainError,
}

impl SampleStatus {
    pub fn is_filled(self) -> bool {
        self != SampleStatus::InBounds
    }
}

/// A source coordinate is in bounds when its nearest pixel exists.
fn nearest_index(v: f64, len: usize) -> Option<usize> {
    let i = (v + 0.5).floor();
    (i >= 0.0 && i < len as f64).then_some(i as usize)
}

fn classify(sample: SourceSample, width: usize, height: usize) -> SampleStatus {
    match sample {
        SourceSample::Undefined => SampleStatus::DomainError,
        SourceSample::At { x, y } => {
            if nearest_index(x, width).is_some() && nearest_index(y, height).is_some() {
                SampleStatus::InBounds
            } else {
                SampleStatus::OutOfBounds
            }
        }
    }
}

/// Result of a warp, with fill accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpOutput {
    pub image: ImageBuffer,
    /// Pixels whose source fell outside the frame.
    pub out_of_bounds: usize,
    /// Pixels where the transform itself was undefined.
    pub domain_errors: usize,
}

impl WarpOutput {
    pub fn filled_pixels(&self) -> usize {
        self.out_of_bounds + self.domain_errors
    }

    pub fn fill_fraction(&self) -> f64 {
        self.filled_pixels() as f64 / (self.image.width() * self.image.height()) as f64
    }
}

fn round_sample(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn sample_into(img: &ImageBuffer, sx: f64, sy: f64, interpolation: Interpolation, out: &mut [u8]) {
    let (w, h) = (img.width(), img.height());
    let clamp_x = |v: f64| v.clamp(0.0, (w - 1) as f64);
    let clamp_y = |v: f64| v.clamp(0.0, (h - 1) as f64);
    let (sx, sy) = (clamp_x(sx), clamp_y(sy));
    match interpolation {
        Interpolation::Nearest => {
            let x = ((sx + 0.5).floor() as usize).min(w - 1);
            let y = ((sy + 0.5).floor() as usize).min(h - 1);
            out.copy_from_slice(img.pixel(x, y));
        }
        Interpolation::Bilinear => {
            let x0 = sx.floor() as usize;
            let y0 = sy.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let y1 = (y0 + 1).min(h - 1);
            let fx = sx - x0 as f64;
            let fy = sy - y0 as f64;
            let (p00, p10, p01, p11) = (img.pixel(x0, y0), img.pixel(x1, y0), img.pixel(x0, y1), img.pixel(x1, y1));
            for (c, o) in out.iter_mut().enumerate() {
                let top = p00[c] as f64 + fx * (p10[c] as f64 - p00[c] as f64);
                let bottom = p01[c] as f64 + fx * (p11[c] as f64 - p01[c] as f64);
                *o = round_sample(top + fy * (bottom - top));
            }
        }
    }
}

/// Resamples `img` through the model by inverse mapping.
///
/// Output has the input's dimensions. Rows are processed in parallel on the
/// current rayon pool; every pixel is computed independently so the result is
/// identical for any thread count.
pub fn warp(img: &ImageBuffer, spec: &WarpSpec) -> Result<WarpOutput> {
    spec.validate()?;
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let frame = Frame::new(w, h);
    let mut data = vec![0u8; w * h * c];
    let counts: Vec<(usize, usize)> = data
        .par_chunks_mut(w * c)
        .enumerate()
        .map(|(y, row)| {
            let (mut oob, mut dom) = (0, 0);
            for (x, out) in row.chunks_mut(c).enumerate() {
                let src = spec.source_of(&frame, x as f64, y as f64);
                match (classify(src, w, h), src) {
                    (SampleStatus::InBounds, SourceSample::At { x: sx, y: sy }) => {
                        sample_into(img, sx, sy, spec.interpolation, out)
                    }
                    (SampleStatus::OutOfBounds, SourceSample::At { x: sx, y: sy }) => {
                        oob += 1;
                        match spec.fill {
                            Fill::Constant(v) => out.fill(v),
                            Fill::EdgeClamp => sample_into(img, sx, sy, spec.interpolation, out),
                        }
                    }
                    _ => {
                        dom += 1;
                        out.fill(match spec.fill {
                            Fill::Constant(v) => v,
                            Fill::EdgeClamp => 0,
                        });
                    }
                }
            }
            (oob, dom)
        })
        .collect();
    let (out_of_bounds, domain_errors) = counts.iter().fold((0, 0), |(a, b), &(o, d)| (a + o, b + d));
    Ok(WarpOutput {
        image: ImageBuffer::new(w, h, c, data)?,
        out_of_bounds,
        domain_errors,
    })
}

/// Per-pixel vector from each output pixel to its source sample, in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    width: usize,
    height: usize,
    vectors: Vec<[f64; 2]>,
    status: Vec<SampleStatus>,
}

impl DisplacementField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Displacement at `(x, y)`; `[0, 0]` where the transform is undefined.
    pub fn at(&self, x: usize, y: usize) -> [f64; 2] {
        self.vectors[y * self.width + x]
    }

    pub fn status(&self, x: usize, y: usize) -> SampleStatus {
        self.status[y * self.width + x]
    }

    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        let [dx, dy] = self.at(x, y);
        dx.hypot(dy)
    }

    pub fn filled_pixels(&self) -> usize {
        self.status.iter().filter(|s| s.is_filled()).count()
    }

    /// Mean displacement magnitude over `region`, skipping undefined pixels.
    pub fn mean_magnitude(&self, region: super::Rect) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for y in region.y..region.y + region.height {
            for x in region.x..region.x + region.width {
                if self.status(x, y) != SampleStatus::DomainError {
                    sum += self.magnitude(x, y);
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Displacement field that [`warp`] would use on a `width`×`height` image.
pub fn displacement_field(spec: &WarpSpec, width: usize, height: usize) -> Result<DisplacementField> {
    spec.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::DimensionMismatch(format!("empty field {width}x{height}")));
    }
    let frame = Frame::new(width, height);
    let (vectors, status): (Vec<_>, Vec<_>) = (0..width * height)
        .into_par_iter()
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let src = spec.source_of(&frame, x, y);
            let v = match src {
                SourceSample::At { x: sx, y: sy } => [sx - x, sy - y],
                SourceSample::Undefined => [0.0, 0.0],
            };
            (v, classify(src, width, height))
        })
        .unzip();
    Ok(DisplacementField {
        width,
        height,
        vectors,
        status,
    })
}

/// Relative change of radial scale between the center and the frame corner.
///
/// With `s(r) = r_u(r) / r`, returns `|1 − s(1) / s(0)|`, where `s(0)` is the
/// analytic limit. For the division model this is `λ / (1 + λ)`. Models whose
/// transform is undefined at the corner yield a domain error.
pub fn magnification_rate(model: &DistortionModel) -> Result<f64> {
    model.validate()?;
    let edge_scale = model.undistorted_radius(1.0)?;
    Ok((1.0 - edge_scale / model.central_scale()).abs())
}
