use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{crop, image_seed, lambda_from_seed, CropOrder, CropSpec, DatasetManifest, DatasetRecipe, Label, LambdaPlan, ManifestEntry};
use crate::error::{Error, Result};
use crate::geometry::DistortionModel;
use crate::imaging::{displacement_field, io, warp, Fill, ImageBuffer, Interpolation, WarpSpec};

pub const MANIFEST_FILE: &str = "manifest.csv";

/// Warp settings and optional per-image face boxes for [`generate`].
#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    pub interpolation: Interpolation,
    pub fill: Fill,
    /// Crop boxes keyed by source path relative to the source directory.
    /// A box overrides the recipe's crop for that image.
    pub face_boxes: HashMap<String, CropSpec>,
}

/// Image after distortion and optional cropping.
#[derive(Debug, Clone, PartialEq)]
pub struct Processed {
    pub image: ImageBuffer,
    /// Fraction of the returned image painted by the fill policy.
    pub fill_fraction: f64,
    pub crop_clamped: bool,
}

/// Applies `spec` and an optional crop in the given order.
pub fn process_image(img: &ImageBuffer, spec: &WarpSpec, crop_spec: Option<&CropSpec>, order: CropOrder) -> Result<Processed> {
    match (crop_spec, order) {
        (None, _) | (_, CropOrder::None) => {
            let out = warp(img, spec)?;
            let fill_fraction = out.fill_fraction();
            Ok(Processed {
                image: out.image,
                fill_fraction,
                crop_clamped: false,
            })
        }
        (Some(c), CropOrder::DistortThenCrop) => {
            let out = warp(img, spec)?;
            let cropped = crop(&out.image, c)?;
            let field = displacement_field(spec, img.width(), img.height())?;
            let r = cropped.rect;
            let filled = (r.y..r.y + r.height)
                .flat_map(|y| (r.x..r.x + r.width).map(move |x| (x, y)))
                .filter(|&(x, y)| field.status(x, y).is_filled())
                .count();
            Ok(Processed {
                image: cropped.image,
                fill_fraction: filled as f64 / r.area() as f64,
                crop_clamped: cropped.clamped,
            })
        }
        (Some(c), CropOrder::CropThenDistort) => {
            let cropped = crop(img, c)?;
            let out = warp(&cropped.image, spec)?;
            let fill_fraction = out.fill_fraction();
            Ok(Processed {
                image: out.image,
                fill_fraction,
                crop_clamped: cropped.clamped,
            })
        }
    }
}

/// Image files under `root`, as sorted relative paths with `/` separators.
pub fn list_images(root: &Path) -> Result<Vec<String>> {
    Ok(list_files(root)?
        .into_iter()
        .filter(|p| io::is_image_path(Path::new(p)))
        .collect())
}

/// All regular files under `root`, as sorted relative paths with `/` separators.
pub fn list_files(root: &Path) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk failed")))
        })?;
        if entry.file_type().is_file() {
            let rel = entry.path().strip_prefix(root).expect("walkdir yields paths under root");
            let parts: Vec<_> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
            files.push(parts.join("/"));
        }
    }
    files.sort();
    Ok(files)
}

fn with_png_extension(rel: &str) -> String {
    let p = Path::new(rel).with_extension("png");
    p.to_string_lossy().replace('\\', "/")
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

struct ImageJob<'a> {
    index: usize,
    rel: &'a str,
}

/// Generates a synthetic corpus into `out_dir` and writes `manifest.csv`.
///
/// Sources are processed in lexicographic order of their relative paths; the
/// λ of image `i` depends only on `(recipe.seed, i)`, so output bytes do not
/// depend on thread scheduling.
pub fn generate(recipe: &DatasetRecipe, out_dir: &Path, options: &GenerateOptions) -> Result<DatasetManifest> {
    recipe.validate()?;
    if !options.face_boxes.is_empty() && recipe.crop_order == CropOrder::None {
        return Err(Error::InvalidRecipe("face boxes need a crop_order".into()));
    }
    let sources = list_images(&recipe.source_dir)?;
    if sources.is_empty() {
        return Err(Error::EmptySource(recipe.source_dir.clone()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let jobs: Vec<ImageJob> = sources.iter().enumerate().map(|(index, rel)| ImageJob { index, rel }).collect();
    let rows: Vec<Vec<ManifestEntry>> = jobs
        .par_iter()
        .map(|job| generate_one(recipe, out_dir, options, job))
        .collect::<Result<_>>()?;
    let entries: Vec<ManifestEntry> = rows.into_iter().flatten().collect();
    if entries.iter().all(|e| e.label == Label::Skipped) {
        return Err(Error::EmptySource(recipe.source_dir.clone()));
    }
    let manifest = DatasetManifest { entries };
    manifest.write(out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

fn generate_one(recipe: &DatasetRecipe, out_dir: &Path, options: &GenerateOptions, job: &ImageJob) -> Result<Vec<ManifestEntry>> {
    let source_path: PathBuf = recipe.source_dir.join(job.rel);
    let source = source_path.to_string_lossy().into_owned();
    let seed = image_seed(recipe.seed, job.index as u64);
    let img = match io::read_image(&source_path) {
        Ok(img) => img,
        Err(_) => {
            return Ok(vec![ManifestEntry {
                source,
                output: String::new(),
                label: Label::Skipped,
                model: None,
                lambda: 0.0,
                seed,
                fill_fraction: 0.0,
            }])
        }
    };
    let model: DistortionModel = match recipe.plan {
        LambdaPlan::Fixed(m) => m,
        LambdaPlan::Range { family, min, max } => family.with_lambda(lambda_from_seed(seed, min, max))?,
    };
    let spec = WarpSpec::synthesize(model)
        .with_interpolation(options.interpolation)
        .with_fill(options.fill);
    let crop_spec = options.face_boxes.get(job.rel).or(recipe.crop.as_ref());
    let processed = process_image(&img, &spec, crop_spec, recipe.crop_order)?;

    let distorted_rel = format!("distorted/{}", with_png_extension(job.rel));
    let distorted_path = out_dir.join(&distorted_rel);
    ensure_parent(&distorted_path)?;
    io::write_image(&processed.image, &distorted_path)?;
    let mut rows = vec![ManifestEntry {
        source: source.clone(),
        output: distorted_rel,
        label: Label::Distorted,
        model: Some(model),
        lambda: model.lambda(),
        seed,
        fill_fraction: processed.fill_fraction,
    }];

    if recipe.emit_undistorted {
        let rel = match (crop_spec, recipe.crop_order) {
            (Some(c), CropOrder::DistortThenCrop | CropOrder::CropThenDistort) => {
                let rel = format!("undistorted/{}", with_png_extension(job.rel));
                let path = out_dir.join(&rel);
                ensure_parent(&path)?;
                io::write_image(&crop(&img, c)?.image, &path)?;
                rel
            }
            _ => {
                // uncropped originals are byte copies of the source file
                let rel = format!("undistorted/{}", job.rel);
                let path = out_dir.join(&rel);
                ensure_parent(&path)?;
                fs::copy(&source_path, &path).map_err(|e| Error::io(&path, e))?;
                rel
            }
        };
        rows.push(ManifestEntry {
            source,
            output: rel,
            label: Label::Undistorted,
            model: None,
            lambda: 0.0,
            seed,
            fill_fraction: 0.0,
        });
    }
    Ok(rows)
}
