//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use radialkit::dataset::{CropOrder, CropSpec};
use radialkit::imaging::{Fill, Interpolation};
use radialkit::DistortionModel;

#[derive(Debug, Parser)]
#[command(name = "radialkit", version, about = "Radial distortion synthesis, detection and evaluation")]
pub struct Cli {
    /// Worker threads for per-image and per-row parallelism (default: all cores)
    #[arg(long, global = true, env = "RADIALKIT_JOBS", value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize radial distortion on one image
    Distort(DistortArgs),
    /// Remove radial distortion from one image
    Rectify(RectifyArgs),
    /// Generate a synthetic corpus from a recipe file
    GenDataset(GenDatasetArgs),
    /// Write procedural face-like portraits for experiments
    ToyCorpus(ToyCorpusArgs),
    /// Train the baseline distortion detector on a generated corpus
    TrainBaseline(TrainArgs),
    /// Emit quality scores (alpha, beta, nqm) for images
    Score(ScoreArgs),
    /// DET curve, EER and AUC of detector scores
    Det(DetArgs),
    /// Error-versus-discard curve for a quality measure
    Edc(EdcArgs),
    /// Compare images with the toy block-mean embedding
    Compare(CompareArgs),
}

pub fn parse_interp(s: &str) -> Result<Interpolation, String> {
    match s {
        "bilinear" => Ok(Interpolation::Bilinear),
        "nearest" => Ok(Interpolation::Nearest),
        _ => Err(format!("expected bilinear or nearest, got {s:?}")),
    }
}

pub fn parse_fill(s: &str) -> Result<Fill, String> {
    match s {
        "black" => Ok(Fill::Constant(0)),
        "clamp" => Ok(Fill::EdgeClamp),
        _ => s
            .parse::<u8>()
            .map(Fill::Constant)
            .map_err(|_| format!("expected black, clamp or a value in 0-255, got {s:?}")),
    }
}

pub fn parse_order(s: &str) -> Result<CropOrder, String> {
    match s {
        "distort-first" => Ok(CropOrder::DistortThenCrop),
        "crop-first" => Ok(CropOrder::CropThenDistort),
        _ => Err(format!("expected distort-first or crop-first, got {s:?}")),
    }
}

fn parse_model(s: &str) -> Result<DistortionModel, String> {
    s.parse().map_err(|e: radialkit::Error| e.to_string())
}

fn parse_crop(s: &str) -> Result<CropSpec, String> {
    s.parse().map_err(|e: radialkit::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct WarpArgs {
    /// Distortion model, e.g. dm:0.6 or kbs:1.5[:f=1]
    #[arg(long, value_parser = parse_model)]
    pub model: DistortionModel,

    /// Resampling: bilinear or nearest
    #[arg(long, value_parser = parse_interp, default_value = "bilinear")]
    pub interp: Interpolation,

    /// Unmapped pixels: black, clamp, or a gray value 0-255
    #[arg(long, value_parser = parse_fill, default_value = "black")]
    pub fill: Fill,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    #[command(flatten)]
    pub warp: WarpArgs,

    /// Crop box `cx,cy,w,h` in pixels, or `center:<fraction>`
    #[arg(long, value_parser = parse_crop)]
    pub crop: Option<CropSpec>,

    /// Whether the crop happens after (distort-first) or before (crop-first) distortion
    #[arg(long, value_parser = parse_order, requires = "crop")]
    pub order: Option<CropOrder>,

    /// Seed recorded in the manifest line
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Source image (PNG, PGM or PPM)
    pub input: PathBuf,
    /// Destination image; the format follows the extension
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RectifyArgs {
    #[command(flatten)]
    pub warp: WarpArgs,

    /// Undistorted original; reports PSNR over the central 60% before and after
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// Distorted image
    pub input: PathBuf,
    /// Rectified image
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenDatasetArgs {
    /// Recipe file (`key = value` lines)
    pub recipe: PathBuf,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,

    /// Face boxes CSV `path,cx,cy,w,h`, paths relative to the source directory
    #[arg(long)]
    pub boxes: Option<PathBuf>,

    /// Resampling: bilinear or nearest
    #[arg(long, value_parser = parse_interp, default_value = "bilinear")]
    pub interp: Interpolation,

    /// Unmapped pixels: black, clamp, or a gray value 0-255
    #[arg(long, value_parser = parse_fill, default_value = "black")]
    pub fill: Fill,

    /// Overrides the recipe seed
    #[arg(long)]
    pub seed: Option<u64>,

    /// Overrides the recipe crop
    #[arg(long, value_parser = parse_crop)]
    pub crop: Option<CropSpec>,

    /// Overrides the recipe crop order: distort-first or crop-first
    #[arg(long, value_parser = parse_order)]
    pub order: Option<CropOrder>,
}

#[derive(Debug, Args)]
pub struct ToyCorpusArgs {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 20)]
    pub count: usize,

    #[arg(long, default_value_t = 96)]
    pub width: usize,

    #[arg(long, default_value_t = 112)]
    pub height: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest (image paths relative to its directory)
    #[arg(long)]
    pub manifest: PathBuf,

    /// Where to write the model file
    #[arg(long)]
    pub out: PathBuf,

    /// Number of concentric annuli (features = 2 per annulus)
    #[arg(long, default_value_t = 8)]
    pub annuli: usize,

    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,

    /// Gradient-descent step size
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,

    /// Seed for weight initialization and the hold-out split
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fraction of source images held out for evaluation (0 disables)
    #[arg(long, default_value_t = 0.0)]
    pub holdout: f64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Baseline model file from train-baseline
    #[arg(long, conflicts_with = "logits", required_unless_present = "logits")]
    pub model_file: Option<PathBuf>,

    /// Logit CSV `id,alpha,beta` from an external detector, or a constant `<alpha>=<beta>` stub
    #[arg(long)]
    pub logits: Option<String>,

    /// Score the rows of a dataset manifest (ids are its output paths)
    #[arg(long, conflicts_with = "images")]
    pub manifest: Option<PathBuf>,

    /// Output score CSV
    #[arg(long)]
    pub out: PathBuf,

    /// Images to score (ids are the paths as given)
    pub images: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetArgs {
    /// Labeled scores `id,score,label`, or a score file together with --manifest
    pub scores: PathBuf,

    /// Manifest supplying labels for a score file
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Output curve CSV
    #[arg(long)]
    pub out: PathBuf,

    /// Also render the curve as SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EdcArgs {
    /// Comparisons CSV `probe,reference,similarity,mated`
    #[arg(long)]
    pub comparisons: PathBuf,

    /// Score CSV giving each image's quality (`id,nqm` or `id,alpha,beta`)
    #[arg(long)]
    pub qualities: PathBuf,

    /// Decision threshold; calibrated from --start-fnmr when omitted
    #[arg(long, conflicts_with = "start_fnmr")]
    pub tau: Option<f64>,

    /// FNMR at zero discard used to calibrate the threshold
    #[arg(long, default_value_t = 0.05)]
    pub start_fnmr: f64,

    /// Output curve CSV
    #[arg(long)]
    pub out: PathBuf,

    /// Also render the curve as SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Pair list CSV `probe,reference,mated`, paths relative to its directory
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    pub pairs: Option<PathBuf>,

    /// Derive pairs from a generated dataset manifest
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Crop applied to every image before embedding
    #[arg(long, value_parser = parse_crop)]
    pub crop: Option<CropSpec>,

    /// Per-image crop boxes CSV `path,cx,cy,w,h` keyed by image id
    #[arg(long)]
    pub boxes: Option<PathBuf>,

    /// Output comparisons CSV
    #[arg(long)]
    pub out: PathBuf,
}
