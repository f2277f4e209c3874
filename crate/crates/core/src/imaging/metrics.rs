use super::{ImageBuffer, Rect};
use crate::error::{Error, Result};

/// Peak signal-to-noise ratio over `region`, in decibels.
///
/// Returns `f64::INFINITY` when the region is identical in both images.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer, region: Rect) -> Result<f64> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    if region.area() == 0 || !region.fits(a.width(), a.height()) {
        return Err(Error::DimensionMismatch(format!("region {region:?} outside the image")));
    }
    let mut sse = 0.0;
    for y in region.y..region.y + region.height {
        for x in region.x..region.x + region.width {
            for (&p, &q) in a.pixel(x, y).iter().zip(b.pixel(x, y)) {
                let d = p as f64 - q as f64;
                sse += d * d;
            }
        }
    }
    let mse = sse / (region.area() * a.channels()) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_infinite() {
        let a = ImageBuffer::gray_from_fn(8, 8, |x, y| (x * y) as u8).unwrap();
        assert_eq!(psnr(&a, &a, Rect::full(8, 8)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn maximal_error_is_zero_db() {
        let a = ImageBuffer::filled(1, 1, 1, 0).unwrap();
        let b = ImageBuffer::filled(1, 1, 1, 255).unwrap();
        assert_eq!(psnr(&a, &b, Rect::full(1, 1)).unwrap(), 0.0);
    }

    #[test]
    fn two_pixel_example() {
        let a = ImageBuffer::new(2, 1, 1, vec![100, 100]).unwrap();
        let b = ImageBuffer::new(2, 1, 1, vec![100, 116]).unwrap();
        let v = psnr(&a, &b, Rect::full(2, 1)).unwrap();
        // MSE 128
        assert!((v - 10.0 * (65025.0f64 / 128.0).log10()).abs() < 1e-12);
        assert!((v - 27.06).abs() < 0.01);
        assert_eq!(v, psnr(&b, &a, Rect::full(2, 1)).unwrap());
    }

    #[test]
    fn mismatch_errors() {
        let a = ImageBuffer::filled(2, 2, 1, 0).unwrap();
        let b = ImageBuffer::filled(2, 2, 3, 0).unwrap();
        assert!(psnr(&a, &b, Rect::full(2, 2)).is_err());
        assert!(psnr(&a, &a, Rect::new(1, 1, 2, 2)).is_err());
    }
}
