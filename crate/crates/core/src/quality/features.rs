use crate::imaging::{Frame, ImageBuffer};

/// Radial image statistics for `annuli` equal-width rings of normalized radius.
///
/// Returns `2 * annuli` values, interleaved per ring: mean luminance, then
/// mean gradient magnitude (central differences, edge-clamped). Empty rings
/// contribute zeros.
pub fn radial_features(img: &ImageBuffer, annuli: usize) -> Vec<f64> {
    assert!(annuli >= 2, "radial features need at least two annuli");
    let (w, h) = (img.width(), img.height());
    let lum = img.luminance_plane();
    let at = |x: usize, y: usize| lum[y * w + x];
    let frame = Frame::new(w, h);
    let mut lum_sum = vec![0.0; annuli];
    let mut grad_sum = vec![0.0; annuli];
    let mut count = vec![0usize; annuli];
    for y in 0..h {
        let (yu, yd) = (y.saturating_sub(1), (y + 1).min(h - 1));
        for x in 0..w {
            let (xl, xr) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let gx = (at(xr, y) - at(xl, y)) / 2.0;
            let gy = (at(x, yd) - at(x, yu)) / 2.0;
            let r = frame.to_norm(x as f64, y as f64).radius().value();
            let ring = ((r * annuli as f64) as usize).min(annuli - 1);
            lum_sum[ring] += at(x, y);
            grad_sum[ring] += gx.hypot(gy);
            count[ring] += 1;
        }
    }
    (0..annuli)
        .flat_map(|i| {
            let n = count[i].max(1) as f64;
            [lum_sum[i] / n, grad_sum[i] / n]
        })
        .collect()
}
