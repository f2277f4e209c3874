use crate::error::{Error, Result};
use crate::geometry::NormPoint;

/// Row-major 8-bit raster with one (gray) or three (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!("empty image {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Unsupported(format!("{channels} channels")));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height}x{channels} needs {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Single-channel image built from a per-pixel function of (column, row).
    pub fn gray_from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, 1, data)
    }

    /// Three-channel image built from a per-pixel function of (column, row).
    pub fn rgb_from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, 3, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    /// Rec. 601 luma of one pixel, in [0, 255].
    pub fn luminance(&self, x: usize, y: usize) -> f64 {
        match self.pixel(x, y) {
            [v] => *v as f64,
            [r, g, b] => 0.299 * *r as f64 + 0.587 * *g as f64 + 0.114 * *b as f64,
            _ => unreachable!("channel count is validated on construction"),
        }
    }

    /// Luma plane as row-major `f64`.
    pub fn luminance_plane(&self) -> Vec<f64> {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .map(|(x, y)| self.luminance(x, y))
            .collect()
    }

    /// Copy of the sub-rectangle `rect`, which must lie inside the frame.
    pub fn sub_image(&self, rect: Rect) -> Result<Self> {
        if rect.width == 0 || rect.height == 0 {
            return Err(Error::DegenerateCrop(format!("{}x{} region", rect.width, rect.height)));
        }
        if !rect.fits(self.width, self.height) {
            return Err(Error::DimensionMismatch(format!(
                "region {rect:?} outside {}x{} image",
                self.width, self.height
            )));
        }
        let c = self.channels;
        let mut data = Vec::with_capacity(rect.width * rect.height * c);
        for y in rect.y..rect.y + rect.height {
            let start = (y * self.width + rect.x) * c;
            data.extend_from_slice(&self.data[start..start + rect.width * c]);
        }
        Self::new(rect.width, rect.height, c, data)
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width, height)
    }

    /// Centered rectangle covering `fraction` of each side.
    pub fn central(width: usize, height: usize, fraction: f64) -> Self {
        let w = ((width as f64 * fraction).round() as usize).clamp(1, width);
        let h = ((height as f64 * fraction).round() as usize).clamp(1, height);
        Self::new((width - w) / 2, (height - h) / 2, w, h)
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x + self.width <= width && self.y + self.height <= height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.width && y >= self.y && y < self.y + self.height
    }
}

/// Pixel ↔ normalized coordinate conversion for one frame size.
///
/// Pixel centers sit on integer coordinates. The origin is the frame center
/// and the unit is half the diagonal between the outermost pixel centers, so
/// corner pixels land exactly on radius 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize) -> Self {
        let cx = (width as f64 - 1.0) / 2.0;
        let cy = (height as f64 - 1.0) / 2.0;
        let half_diag = cx.hypot(cy);
        // a 1x1 frame has a single pixel at the origin
        let scale = if half_diag > 0.0 { half_diag } else { 1.0 };
        Self { cx, cy, scale }
    }

    /// Pixels per normalized unit.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn to_norm(&self, x: f64, y: f64) -> NormPoint {
        NormPoint::new((x - self.cx) / self.scale, (y - self.cy) / self.scale)
    }

    pub fn to_pixel(&self, p: NormPoint) -> (f64, f64) {
        (p.x * self.scale + self.cx, p.y * self.scale + self.cy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageBuffer::new(0, 2, 1, vec![]).is_err());
        assert!(ImageBuffer::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::new(2, 2, 1, vec![0; 3]).is_err());
        assert!(ImageBuffer::new(2, 2, 3, vec![0; 12]).is_ok());
    }

    #[test]
    fn frame_corners_on_unit_circle() {
        for (w, h) in [(64, 64), (101, 101), (640, 480), (3, 7)] {
            let f = Frame::new(w, h);
            for (x, y) in [(0, 0), (w - 1, 0), (0, h - 1), (w - 1, h - 1)] {
                let r = f.to_norm(x as f64, y as f64).radius().value();
                assert!((r - 1.0).abs() < 1e-15, "{w}x{h} corner radius {r}");
            }
        }
    }

    #[test]
    fn frame_round_trip() {
        let f = Frame::new(33, 20);
        let (x, y) = f.to_pixel(f.to_norm(7.0, 13.0));
        assert!((x - 7.0).abs() < 1e-12 && (y - 13.0).abs() < 1e-12);
    }

    #[test]
    fn sub_image_copies_rows() {
        let img = ImageBuffer::gray_from_fn(4, 3, |x, y| (10 * y + x) as u8).unwrap();
        let sub = img.sub_image(Rect::new(1, 1, 2, 2)).unwrap();
        assert_eq!(sub.data(), &[11, 12, 21, 22]);
        assert!(img.sub_image(Rect::new(3, 0, 2, 1)).is_err());
        assert!(matches!(img.sub_image(Rect::new(0, 0, 0, 1)), Err(Error::DegenerateCrop(_))));
    }

    #[test]
    fn central_rect() {
        assert_eq!(Rect::central(100, 100, 0.6), Rect::new(20, 20, 60, 60));
        assert_eq!(Rect::central(100, 100, 1.0), Rect::full(100, 100));
    }
}
