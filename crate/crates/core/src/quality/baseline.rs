//! Linear distortion detector on radial statistics.
//!
//! Logistic regression with label `distorted = 1`, trained by full-batch
//! gradient descent on standardized [`radial_features`].

use std::fmt::Write as _;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use rayon::prelude::*;

use super::{radial_features, Logits, ScoreRecord};
use crate::dataset::{unit_interval, DatasetManifest, Label};
use crate::error::{Error, Result};
use crate::imaging::{read_image, ImageBuffer};

const MAGIC: &str = "radialkit-baseline v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub annuli: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            annuli: 8,
            epochs: 2000,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

/// Trained detector. `weights` has one entry per feature plus a trailing bias.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub annuli: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub weights: Vec<f64>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Model plus the mean training loss before each epoch and after the last.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub model: BaselineModel,
    pub losses: Vec<f64>,
}

impl TrainingRun {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("losses include the initial value")
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean logistic loss `mean(log(1 + e^z) − y z)` with `z = w · x`.
///
/// Rows of `x` already include the bias column.
pub fn logistic_loss(weights: &[f64], x: &[Vec<f64>], y: &[f64]) -> f64 {
    let total: f64 = x.iter().zip(y).map(|(row, &t)| {
        let z = dot(weights, row);
        softplus(z) - t * z
    }).sum();
    total / x.len() as f64
}

/// Analytic gradient of [`logistic_loss`]: `mean((σ(z) − y) x)`.
pub fn logistic_gradient(weights: &[f64], x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut grad = vec![0.0; weights.len()];
    for (row, &t) in x.iter().zip(y) {
        let r = sigmoid(dot(weights, row)) - t;
        for (g, v) in grad.iter_mut().zip(row) {
            *g += r * v;
        }
    }
    let n = x.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    grad
}

fn standardization(features: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = features[0].len();
    let n = features.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| features.iter().map(|f| f[j]).sum::<f64>() / n).collect();
    let std = (0..d)
        .map(|j| {
            let var = features.iter().map(|f| (f[j] - mean[j]).powi(2)).sum::<f64>() / n;
            // constant features standardize to zero
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    (mean, std)
}

impl BaselineModel {
    /// Standardized feature vector with the bias column appended.
    pub fn design_row(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .chain(std::iter::once(1.0))
            .collect()
    }

    /// Logit of the distorted class.
    pub fn decision(&self, features: &[f64]) -> f64 {
        dot(&self.weights, &self.design_row(features))
    }

    /// Logits `(α, β) = (z/2, −z/2)`, so that the native quality measure
    /// equals the model's probability of the undistorted class.
    pub fn logits(&self, features: &[f64]) -> Logits {
        let z = self.decision(features);
        Logits::new(z / 2.0, -z / 2.0)
    }

    pub fn score_image(&self, img: &ImageBuffer) -> Logits {
        self.logits(&radial_features(img, self.annuli))
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        writeln!(s, "{MAGIC}").unwrap();
        writeln!(s, "annuli = {}", self.annuli).unwrap();
        writeln!(s, "epochs = {}", self.epochs).unwrap();
        writeln!(s, "learning_rate = {:?}", self.learning_rate).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "mean = {}", join(&self.mean)).unwrap();
        writeln!(s, "std = {}", join(&self.std)).unwrap();
        writeln!(s, "weights = {}", join(&self.weights)).unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(MAGIC) {
            return Err(Error::Schema(format!("model file must start with {MAGIC:?}")));
        }
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Schema(format!("model file: missing {key}")))?;
            match line.split_once('=') {
                Some((k, v)) if k.trim() == key => Ok(v.trim().to_string()),
                _ => Err(Error::Schema(format!("model file: expected {key}, got {line:?}"))),
            }
        };
        let bad = |key: &str| Error::Schema(format!("model file: invalid {key}"));
        let floats = |s: String, key: &str| -> Result<Vec<f64>> {
            s.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| bad(key))).collect()
        };
        let annuli: usize = field("annuli")?.parse().map_err(|_| bad("annuli"))?;
        let epochs = field("epochs")?.parse().map_err(|_| bad("epochs"))?;
        let learning_rate = field("learning_rate")?.parse().map_err(|_| bad("learning_rate"))?;
        let seed = field("seed")?.parse().map_err(|_| bad("seed"))?;
        let mean = floats(field("mean")?, "mean")?;
        let std = floats(field("std")?, "std")?;
        let weights = floats(field("weights")?, "weights")?;
        let d = 2 * annuli;
        if annuli < 2 || mean.len() != d || std.len() != d || weights.len() != d + 1 {
            return Err(Error::Schema("model file: inconsistent dimensions".into()));
        }
        if weights.iter().chain(&mean).chain(&std).any(|v| !v.is_finite()) || std.iter().any(|&s| s <= 0.0) {
            return Err(Error::Schema("model file: non-finite parameters".into()));
        }
        Ok(Self {
            annuli,
            mean,
            std,
            weights,
            epochs,
            learning_rate,
            seed,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Fits the detector on precomputed feature vectors (`true` = distorted).
pub fn train_logistic(features: &[Vec<f64>], labels: &[bool], config: &BaselineConfig) -> Result<TrainingRun> {
    if features.len() != labels.len() || features.is_empty() {
        return Err(Error::Schema("features and labels must be non-empty and equally long".into()));
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::SingleClass("training needs distorted and undistorted samples".into()));
    }
    let d = features[0].len();
    if features.iter().any(|f| f.len() != d) {
        return Err(Error::Schema("feature vectors differ in length".into()));
    }
    if !(config.learning_rate.is_finite() && config.learning_rate > 0.0) {
        return Err(Error::Schema(format!("learning rate {}", config.learning_rate)));
    }
    let (mean, std) = standardization(features);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = (0..=d).map(|_| 0.02 * unit_interval(rng.next_u64()) - 0.01).collect();
    let mut model = BaselineModel {
        annuli: d / 2,
        mean,
        std,
        weights,
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        seed: config.seed,
    };
    let x: Vec<Vec<f64>> = features.iter().map(|f| model.design_row(f)).collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();

    let mut losses = Vec::with_capacity(config.epochs + 1);
    for _ in 0..config.epochs {
        losses.push(logistic_loss(&model.weights, &x, &y));
        let grad = logistic_gradient(&model.weights, &x, &y);
        for (w, g) in model.weights.iter_mut().zip(grad) {
            *w -= config.learning_rate * g;
        }
    }
    losses.push(logistic_loss(&model.weights, &x, &y));
    Ok(TrainingRun { model, losses })
}

/// Extracts features for every labeled manifest row (paths relative to `root`).
pub fn manifest_features(manifest: &DatasetManifest, root: &Path, annuli: usize) -> Result<(Vec<String>, Vec<Vec<f64>>, Vec<bool>)> {
    let rows: Vec<_> = manifest.entries.iter().filter(|e| e.label != Label::Skipped).collect();
    let features = rows
        .par_iter()
        .map(|e| read_image(root.join(&e.output)).map(|img| radial_features(&img, annuli)))
        .collect::<Result<Vec<_>>>()?;
    let ids = rows.iter().map(|e| e.output.clone()).collect();
    let labels = rows.iter().map(|e| e.label == Label::Distorted).collect();
    Ok((ids, features, labels))
}

/// Trains the detector on the images of a manifest located in `root`.
pub fn train_baseline(manifest: &DatasetManifest, root: &Path, config: &BaselineConfig) -> Result<TrainingRun> {
    if config.annuli < 2 {
        return Err(Error::Schema("need at least two annuli".into()));
    }
    let (_, features, labels) = manifest_features(manifest, root, config.annuli)?;
    train_logistic(&features, &labels, config)
}

/// Scores images; `ids[i]` names `images[i]`.
pub fn score_images(model: &BaselineModel, ids: &[String], images: &[ImageBuffer]) -> Vec<ScoreRecord> {
    ids.iter()
        .zip(images)
        .map(|(id, img)| ScoreRecord::from_logits(id.clone(), model.score_image(img)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_pair() {
        let features = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let labels = vec![true, false];
        let run = train_logistic(&features, &labels, &BaselineConfig::default()).unwrap();
        assert!(run.model.decision(&features[0]) > 0.0);
        assert!(run.model.decision(&features[1]) < 0.0);
    }

    #[test]
    fn single_class_rejected() {
        let features = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(matches!(
            train_logistic(&features, &[true, true], &BaselineConfig::default()),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn boundary_gives_half() {
        let model = BaselineModel {
            annuli: 1,
            mean: vec![0.0, 0.0],
            std: vec![1.0, 1.0],
            weights: vec![2.0, -1.0, 0.0],
            epochs: 0,
            learning_rate: 0.1,
            seed: 0,
        };
        assert_eq!(model.logits(&[1.0, 2.0]).nqm(), 0.5);
        // probability of the undistorted class is σ(−z)
        let z = model.decision(&[1.0, 0.5]);
        assert!((model.logits(&[1.0, 0.5]).nqm() - 1.0 / (1.0 + z.exp())).abs() < 1e-15);
    }

    #[test]
    fn model_text_round_trip() {
        let model = BaselineModel {
            annuli: 2,
            mean: vec![1.5, 0.1, 3.0, 1e-7],
            std: vec![1.0, 2.0, 0.3, 0.1],
            weights: vec![0.1, -0.2, 0.3, 1.0 / 3.0, -4.0],
            epochs: 10,
            learning_rate: 0.05,
            seed: 9,
        };
        assert_eq!(BaselineModel::parse(&model.to_text()).unwrap(), model);
        assert!(BaselineModel::parse("nope\n").is_err());
        let broken = model.to_text().replace("annuli = 2", "annuli = 3");
        assert!(BaselineModel::parse(&broken).is_err());
    }

    #[test]
    fn loss_is_stable_for_large_logits() {
        let x = vec![vec![1000.0, 1.0], vec![-1000.0, 1.0]];
        let y = vec![0.0, 1.0];
        let l = logistic_loss(&[1.0, 0.0], &x, &y);
        assert!((l - 1000.0).abs() < 1e-9);
    }
}
