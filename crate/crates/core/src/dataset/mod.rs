//! Deterministic synthetic corpora: recipes, λ draws, cropping, manifests.

mod crop;
mod generate;
mod lambda;
mod manifest;
mod pipeline;
mod recipe;
pub mod synth;

pub use crop::{crop, CropSpec, Cropped};
pub use generate::{generate, list_files, list_images, process_image, GenerateOptions, Processed, MANIFEST_FILE};
pub use lambda::{draw_lambda, image_seed, lambda_from_seed, unit_interval};
pub use manifest::{DatasetManifest, Label, ManifestEntry, MANIFEST_HEADER};
pub use pipeline::{pipeline_pair, PipelinePair, PipelineStats};
pub use recipe::{CropOrder, DatasetRecipe, LambdaPlan};

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Reads external face boxes from CSV `path,cx,cy,w,h`.
pub fn read_face_boxes(path: impl AsRef<Path>) -> Result<HashMap<String, CropSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_face_boxes(&text)
}

pub fn parse_face_boxes(text: &str) -> Result<HashMap<String, CropSpec>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["path", "cx", "cy", "w", "h"] {
        return Err(Error::Schema("face box header must be path,cx,cy,w,h".into()));
    }
    let mut boxes = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        let bad = || Error::Schema(format!("face box line {}", i + 2));
        let spec = CropSpec::Box {
            cx: rec[1].parse().map_err(|_| bad())?,
            cy: rec[2].parse().map_err(|_| bad())?,
            width: rec[3].parse().map_err(|_| bad())?,
            height: rec[4].parse().map_err(|_| bad())?,
        };
        spec.validate()?;
        boxes.insert(rec[0].to_string(), spec);
    }
    Ok(boxes)
}
