use super::{crop, CropSpec};
use crate::error::Result;
use crate::geometry::DistortionModel;
use crate::imaging::{displacement_field, warp, ImageBuffer, Rect, WarpSpec};

/// Mean displacement of the two crop/distort orders, in pixels of the final crop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineStats {
    pub rect: Rect,
    pub distort_first_displacement: f64,
    pub crop_first_displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePair {
    /// Distortion on the full frame, then crop.
    pub distort_first: ImageBuffer,
    /// Crop, then distortion on the crop's own frame.
    pub crop_first: ImageBuffer,
    pub stats: PipelineStats,
}

/// Runs both orders of division-model distortion and cropping on `img`.
///
/// Each pipeline normalizes coordinates by its own frame: the full image for
/// distort-first and the crop for crop-first.
pub fn pipeline_pair(img: &ImageBuffer, lambda: f64, crop_spec: &CropSpec) -> Result<PipelinePair> {
    let spec = WarpSpec::synthesize(DistortionModel::division(lambda)?);
    let (rect, _) = crop_spec.resolve(img.width(), img.height())?;

    let full = warp(img, &spec)?;
    let distort_first = crop(&full.image, crop_spec)?.image;
    let full_field = displacement_field(&spec, img.width(), img.height())?;

    let cropped = crop(img, crop_spec)?.image;
    let crop_first = warp(&cropped, &spec)?.image;
    let crop_field = displacement_field(&spec, rect.width, rect.height)?;

    Ok(PipelinePair {
        distort_first,
        crop_first,
        stats: PipelineStats {
            rect,
            distort_first_displacement: full_field.mean_magnitude(rect),
            crop_first_displacement: crop_field.mean_magnitude(Rect::full(rect.width, rect.height)),
        },
    })
}
