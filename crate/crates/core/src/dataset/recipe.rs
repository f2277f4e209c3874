use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CropSpec;
use crate::error::{Error, Result};
use crate::geometry::{DistortionModel, ModelFamily};

/// Distortion applied to every image of a corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPlan {
    Fixed(DistortionModel),
    /// λ drawn uniformly per image from `[min, max]`.
    Range { family: ModelFamily, min: f64, max: f64 },
}

/// Relative order of distortion and cropping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CropOrder {
    #[default]
    None,
    DistortThenCrop,
    CropThenDistort,
}

impl FromStr for CropOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CropOrder::None),
            "distort_then_crop" | "distort-first" => Ok(CropOrder::DistortThenCrop),
            "crop_then_distort" | "crop-first" => Ok(CropOrder::CropThenDistort),
            _ => Err(Error::parse("crop order", s)),
        }
    }
}

impl fmt::Display for CropOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CropOrder::None => "none",
            CropOrder::DistortThenCrop => "distort_then_crop",
            CropOrder::CropThenDistort => "crop_then_distort",
        })
    }
}

/// Recipe for one synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecipe {
    pub name: String,
    pub source_dir: PathBuf,
    pub plan: LambdaPlan,
    pub seed: u64,
    pub emit_undistorted: bool,
    pub crop: Option<CropSpec>,
    pub crop_order: CropOrder,
}

impl DatasetRecipe {
    pub fn fixed(name: impl Into<String>, source_dir: impl Into<PathBuf>, model: DistortionModel) -> Self {
        Self {
            name: name.into(),
            source_dir: source_dir.into(),
            plan: LambdaPlan::Fixed(model),
            seed: 0,
            emit_undistorted: false,
            crop: None,
            crop_order: CropOrder::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.plan {
            LambdaPlan::Fixed(m) => m.validate()?,
            LambdaPlan::Range { family, min, max } => {
                if !(min <= max) {
                    return Err(Error::InvalidRecipe(format!("lambda_min {min} > lambda_max {max}")));
                }
                family
                    .with_lambda(min)
                    .and_then(|_| family.with_lambda(max))
                    .map_err(|e| Error::InvalidRecipe(format!("lambda range [{min}, {max}]: {e}")))?;
            }
        }
        match (self.crop, self.crop_order) {
            (None, CropOrder::DistortThenCrop | CropOrder::CropThenDistort) => Err(Error::InvalidRecipe(
                format!("crop_order {} without a crop", self.crop_order),
            )),
            (Some(_), CropOrder::None) => Err(Error::InvalidRecipe("crop given with crop_order none".into())),
            (Some(c), _) => c.validate(),
            (None, CropOrder::None) => Ok(()),
        }
    }

    /// Reads a recipe file. A relative `source_dir` resolves against the
    /// recipe's own directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut recipe = Self::parse(&text)?;
        if recipe.source_dir.is_relative() {
            if let Some(parent) = path.parent() {
                recipe.source_dir = parent.join(&recipe.source_dir);
            }
        }
        Ok(recipe)
    }

    /// Parses flat `key = value` text. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut source_dir = None;
        let mut model = None;
        let mut lambda_min = None;
        let mut lambda_max = None;
        let mut seed = None;
        let mut emit_undistorted = false;
        let mut crop = None;
        let mut crop_order = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidRecipe(format!("line {}: expected key = value", lineno + 1)))?;
            let bad = |what: &str| Error::InvalidRecipe(format!("line {}: invalid {what} {value:?}", lineno + 1));
            match key {
                "name" => name = Some(value.to_string()),
                "source_dir" => source_dir = Some(PathBuf::from(value)),
                "model" => model = Some(value.to_string()),
                "lambda_min" => lambda_min = Some(value.parse::<f64>().map_err(|_| bad("lambda_min"))?),
                "lambda_max" => lambda_max = Some(value.parse::<f64>().map_err(|_| bad("lambda_max"))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("seed"))?),
                "emit_undistorted" => {
                    emit_undistorted = match value {
                        "true" | "1" | "yes" => true,
                        "false" | "0" | "no" => false,
                        _ => return Err(bad("emit_undistorted")),
                    }
                }
                "crop" => crop = Some(value.parse::<CropSpec>().map_err(|_| bad("crop"))?),
                "crop_order" => crop_order = Some(value.parse::<CropOrder>().map_err(|_| bad("crop_order"))?),
                other => {
                    return Err(Error::InvalidRecipe(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }

        let missing = |k: &str| Error::InvalidRecipe(format!("missing key {k}"));
        let model = model.ok_or_else(|| missing("model"))?;
        let plan = match (lambda_min, lambda_max) {
            (None, None) => LambdaPlan::Fixed(model.parse().map_err(|e| Error::InvalidRecipe(format!("{e}")))?),
            (Some(min), Some(max)) => {
                if seed.is_none() {
                    return Err(Error::InvalidRecipe("a lambda range needs a seed".into()));
                }
                let family = model
                    .parse::<ModelFamily>()
                    .map_err(|_| Error::InvalidRecipe(format!("with a lambda range, model must be a family (dm, kbs, ...), got {model:?}")))?;
                LambdaPlan::Range { family, min, max }
            }
            _ => return Err(Error::InvalidRecipe("lambda_min and lambda_max go together".into())),
        };
        let crop_order = match (crop, crop_order) {
            (Some(_), None) => CropOrder::DistortThenCrop,
            (_, order) => order.unwrap_or_default(),
        };
        let recipe = DatasetRecipe {
            name: name.ok_or_else(|| missing("name"))?,
            source_dir: source_dir.ok_or_else(|| missing("source_dir"))?,
            plan,
            seed: seed.unwrap_or(0),
            emit_undistorted,
            crop,
            crop_order,
        };
        recipe.validate()?;
        Ok(recipe)
    }
}
