use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::{ImageBuffer, Rect};

/// Axis-aligned crop standing in for face alignment and cropping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CropSpec {
    /// Box of `width`×`height` pixels centered at pixel `(cx, cy)`.
    Box { cx: f64, cy: f64, width: usize, height: usize },
    /// Box centered on the image, each side `fraction` of the image side.
    Centered { fraction: f64 },
}

impl CropSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CropSpec::Box { cx, cy, width, height } => {
                if !(cx.is_finite() && cy.is_finite()) || width == 0 || height == 0 {
                    return Err(Error::DegenerateCrop(format!("{self}")));
                }
            }
            CropSpec::Centered { fraction } => {
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(Error::DegenerateCrop(format!("center fraction {fraction}")));
                }
            }
        }
        Ok(())
    }

    /// Requested rectangle as signed pixel bounds `[x0, x1) × [y0, y1)`.
    fn requested(&self, width: usize, height: usize) -> (i64, i64, i64, i64) {
        let (cx, cy, w, h) = match *self {
            CropSpec::Box { cx, cy, width, height } => (cx, cy, width, height),
            CropSpec::Centered { fraction } => {
                let w = ((width as f64 * fraction).round() as usize).max(1);
                let h = ((height as f64 * fraction).round() as usize).max(1);
                (width as f64 / 2.0, height as f64 / 2.0, w, h)
            }
        };
        let x0 = (cx - w as f64 / 2.0).round() as i64;
        let y0 = (cy - h as f64 / 2.0).round() as i64;
        (x0, y0, x0 + w as i64, y0 + h as i64)
    }

    /// Crop rectangle after clamping to the frame, plus whether clamping occurred.
    pub fn resolve(&self, width: usize, height: usize) -> Result<(Rect, bool)> {
        self.validate()?;
        let (x0, y0, x1, y1) = self.requested(width, height);
        let cx0 = x0.clamp(0, width as i64);
        let cy0 = y0.clamp(0, height as i64);
        let cx1 = x1.clamp(0, width as i64);
        let cy1 = y1.clamp(0, height as i64);
        if cx1 <= cx0 || cy1 <= cy0 {
            return Err(Error::DegenerateCrop(format!(
                "{self} does not overlap the {width}x{height} frame"
            )));
        }
        let clamped = (cx0, cy0, cx1, cy1) != (x0, y0, x1, y1);
        let rect = Rect::new(cx0 as usize, cy0 as usize, (cx1 - cx0) as usize, (cy1 - cy0) as usize);
        Ok((rect, clamped))
    }
}

impl fmt::Display for CropSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CropSpec::Box { cx, cy, width, height } => write!(f, "{cx},{cy},{width},{height}"),
            CropSpec::Centered { fraction } => write!(f, "center:{fraction}"),
        }
    }
}

impl FromStr for CropSpec {
    type Err = Error;

    /// Parses `cx,cy,w,h` or `center:<fraction>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse("crop", s);
        let spec = if let Some(frac) = s.strip_prefix("center:") {
            CropSpec::Centered {
                fraction: frac.trim().parse().map_err(|_| bad())?,
            }
        } else {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            let [cx, cy, w, h] = parts.as_slice() else {
                return Err(bad());
            };
            CropSpec::Box {
                cx: cx.parse().map_err(|_| bad())?,
                cy: cy.parse().map_err(|_| bad())?,
                width: w.parse().map_err(|_| bad())?,
                height: h.parse().map_err(|_| bad())?,
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A cropped image with the rectangle actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct Cropped {
    pub image: ImageBuffer,
    pub rect: Rect,
    /// The requested box extended past the frame and was clamped.
    pub clamped: bool,
}

pub fn crop(img: &ImageBuffer, spec: &CropSpec) -> Result<Cropped> {
    let (rect, clamped) = spec.resolve(img.width(), img.height())?;
    Ok(Cropped {
        image: img.sub_image(rect)?,
        rect,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(w: usize, h: usize) -> ImageBuffer {
        ImageBuffer::gray_from_fn(w, h, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap()
    }

    #[test]
    fn full_frame_is_identity() {
        let src = img(31, 17);
        let c = crop(&src, &CropSpec::Centered { fraction: 1.0 }).unwrap();
        assert_eq!(c.image, src);
        assert!(!c.clamped);
        let c = crop(&src, &"15.5,8.5,31,17".parse().unwrap()).unwrap();
        assert_eq!(c.image, src);
    }

    #[test]
    fn centered_half() {
        let c = crop(&img(100, 100), &"center:0.5".parse().unwrap()).unwrap();
        assert_eq!(c.rect, Rect::new(25, 25, 50, 50));
        assert_eq!(c.image.width(), 50);
    }

    #[test]
    fn out_of_bounds_clamps() {
        let c = crop(&img(40, 40), &"35,5,20,20".parse().unwrap()).unwrap();
        assert!(c.clamped);
        assert_eq!(c.rect, Rect::new(25, 0, 15, 15));
    }

    #[test]
    fn degenerate() {
        assert!("10,10,0,5".parse::<CropSpec>().is_err());
        assert!("center:0".parse::<CropSpec>().is_err());
        assert!("center:1.5".parse::<CropSpec>().is_err());
        assert!("1,2,3".parse::<CropSpec>().is_err());
        let far = CropSpec::Box { cx: 500.0, cy: 500.0, width: 10, height: 10 };
        assert!(matches!(crop(&img(40, 40), &far), Err(Error::DegenerateCrop(_))));
    }
}
