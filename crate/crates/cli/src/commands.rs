//! Subcommand implementations. Reports go to `out`, one `key: value` per line.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use radialkit::curves::{
    auc, calibrate_threshold, comparisons_to_csv, det_curve, edc_curve, eer_from_vertices, parse_labeled_scores,
    read_comparisons, Class, LabeledScore,
};
use radialkit::dataset::{
    self, generate, image_seed, process_image, synth, CropOrder, DatasetManifest, DatasetRecipe, GenerateOptions,
    Label, ManifestEntry, MANIFEST_FILE,
};
use radialkit::imaging::{magnification_rate, psnr, read_image, warp, write_image, WarpSpec};
use radialkit::numfmt::format_sig;
use radialkit::quality::{
    manifest_features, read_scores, score_images, train_logistic, write_scores, BaselineConfig, BaselineModel, Logits,
    ScoreRecord,
};
use radialkit::{Error, Rect, Result};

use crate::args::*;
use crate::compare::{compare_pairs, manifest_pairs, parse_pairs, CropPolicy};

/// Runs a parsed command line, honoring `--jobs`. The report is written to
/// `out` once the command finishes.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let pool = match cli.jobs {
        Some(0) => return Err(Error::Schema("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| Error::Schema(format!("thread pool: {e}")))?;
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut buf));
    out.write_all(&buf).map_err(|e| Error::io("<stdout>", e))?;
    result
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Distort(a) => distort(a, out),
        Command::Rectify(a) => rectify(a, out),
        Command::GenDataset(a) => gen_dataset(a, out),
        Command::ToyCorpus(a) => toy_corpus(a, out),
        Command::TrainBaseline(a) => train_baseline(a, out),
        Command::Score(a) => score(a, out),
        Command::Det(a) => det(a, out),
        Command::Edc(a) => edc(a, out),
        Command::Compare(a) => compare(a, out),
    }
}

fn report(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key}: {value}").map_err(|e| Error::io("<stdout>", e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn warp_spec(w: &WarpArgs, rectify: bool) -> WarpSpec {
    let spec = if rectify {
        WarpSpec::rectify(w.model)
    } else {
        WarpSpec::synthesize(w.model)
    };
    spec.with_interpolation(w.interp).with_fill(w.fill)
}

fn distort(a: DistortArgs, out: &mut dyn Write) -> Result<()> {
    let img = read_image(&a.input)?;
    let spec = warp_spec(&a.warp, false);
    let order = match a.crop {
        Some(_) => a.order.unwrap_or(CropOrder::DistortThenCrop),
        None => CropOrder::None,
    };
    let processed = process_image(&img, &spec, a.crop.as_ref(), order)?;
    write_image(&processed.image, &a.output)?;
    let row = DatasetManifest {
        entries: vec![ManifestEntry {
            source: a.input.to_string_lossy().into_owned(),
            output: a.output.to_string_lossy().into_owned(),
            label: Label::Distorted,
            model: Some(a.warp.model),
            lambda: a.warp.model.lambda(),
            seed: a.seed,
            fill_fraction: processed.fill_fraction,
        }],
    };
    let csv = row.to_csv();
    let line = csv.lines().nth(1).expect("one data row");
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    report(out, "magnification_rate", format_sig(magnification_rate(&a.warp.model)?, 6))?;
    if processed.crop_clamped {
        report(out, "crop_clamped", true)?;
    }
    Ok(())
}

fn rectify(a: RectifyArgs, out: &mut dyn Write) -> Result<()> {
    let img = read_image(&a.input)?;
    let result = warp(&img, &warp_spec(&a.warp, true))?;
    write_image(&result.image, &a.output)?;
    report(out, "output", a.output.display())?;
    report(out, "fill_fraction", format_sig(result.fill_fraction(), 6))?;
    report(out, "magnification_rate", format_sig(magnification_rate(&a.warp.model)?, 6))?;
    if let Some(reference) = a.reference {
        let reference = read_image(&reference)?;
        let region = Rect::central(img.width(), img.height(), 0.6);
        let before = psnr(&img, &reference, region)?;
        let after = psnr(&result.image, &reference, region)?;
        report(out, "psnr_before", format_sig(before, 6))?;
        report(out, "psnr_after", format_sig(after, 6))?;
        report(out, "psnr_gain", format_sig(after - before, 6))?;
    }
    Ok(())
}

fn gen_dataset(a: GenDatasetArgs, out: &mut dyn Write) -> Result<()> {
    let mut recipe = DatasetRecipe::from_file(&a.recipe)?;
    if let Some(seed) = a.seed {
        recipe.seed = seed;
    }
    if let Some(crop) = a.crop {
        recipe.crop = Some(crop);
        if recipe.crop_order == CropOrder::None {
            recipe.crop_order = CropOrder::DistortThenCrop;
        }
    }
    if let Some(order) = a.order {
        recipe.crop_order = order;
    }
    let face_boxes = match &a.boxes {
        Some(path) => dataset::read_face_boxes(path)?,
        None => HashMap::new(),
    };
    if !face_boxes.is_empty() && recipe.crop_order == CropOrder::None {
        recipe.crop_order = CropOrder::DistortThenCrop;
    }
    let options = GenerateOptions {
        interpolation: a.interp,
        fill: a.fill,
        face_boxes,
    };
    let manifest = generate(&recipe, &a.out, &options)?;
    report(out, "dataset", &recipe.name)?;
    report(out, "distorted", manifest.count(Label::Distorted))?;
    report(out, "undistorted", manifest.count(Label::Undistorted))?;
    report(out, "skipped", manifest.count(Label::Skipped))?;
    report(out, "manifest", a.out.join(MANIFEST_FILE).display())
}

fn toy_corpus(a: ToyCorpusArgs, out: &mut dyn Write) -> Result<()> {
    if a.count == 0 || a.width < 8 || a.height < 8 {
        return Err(Error::Schema("toy corpus needs count >= 1 and images of at least 8x8".into()));
    }
    let paths = synth::write_toy_corpus(&a.out, a.count, a.width, a.height, a.seed)?;
    report(out, "images", paths.len())?;
    report(out, "directory", a.out.display())
}

/// Splits a manifest by source image so that every version of a source lands
/// on the same side. Returns `(train, held_out)`.
pub fn holdout_split(manifest: &DatasetManifest, fraction: f64, seed: u64) -> Result<(DatasetManifest, DatasetManifest)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Schema(format!("hold-out fraction {fraction} outside [0, 1)")));
    }
    let mut sources: Vec<&str> = manifest.entries.iter().map(|e| e.source.as_str()).collect();
    sources.sort_unstable();
    sources.dedup();
    let mut keyed: Vec<(u64, &str)> = sources
        .iter()
        .enumerate()
        .map(|(i, s)| (image_seed(seed, i as u64), *s))
        .collect();
    keyed.sort_unstable();
    let held = (fraction * sources.len() as f64).round() as usize;
    let held: Vec<&str> = keyed[..held].iter().map(|(_, s)| *s).collect();
    let (test, train): (Vec<ManifestEntry>, Vec<ManifestEntry>) =
        manifest.entries.iter().cloned().partition(|e| held.contains(&e.source.as_str()));
    Ok((DatasetManifest { entries: train }, DatasetManifest { entries: test }))
}

/// Detector scores of manifest images, higher meaning more distorted.
fn detector_scores(model: &BaselineModel, manifest: &DatasetManifest, root: &Path) -> Result<Vec<LabeledScore>> {
    let (ids, features, labels) = manifest_features(manifest, root, model.annuli)?;
    Ok(ids
        .into_iter()
        .zip(features)
        .zip(labels)
        .map(|((id, f), distorted)| {
            let label = if distorted { Class::Distorted } else { Class::Undistorted };
            LabeledScore::new(id, model.decision(&f), label)
        })
        .collect())
}

fn train_baseline(a: TrainArgs, out: &mut dyn Write) -> Result<()> {
    let manifest = DatasetManifest::read(&a.manifest)?;
    let root = parent_dir(&a.manifest);
    let (train, held) = holdout_split(&manifest, a.holdout, a.seed)?;
    if a.annuli < 2 {
        return Err(Error::Schema("--annuli must be at least 2".into()));
    }
    let config = BaselineConfig {
        annuli: a.annuli,
        epochs: a.epochs,
        learning_rate: a.lr,
        seed: a.seed,
    };
    let (_, features, labels) = manifest_features(&train, &root, a.annuli)?;
    let run = train_logistic(&features, &labels, &config)?;
    run.model.write(&a.out)?;
    report(out, "model", a.out.display())?;
    report(out, "train_images", features.len())?;
    report(out, "final_loss", format_sig(run.final_loss(), 6))?;
    let (prefix, eval) = if held.entries.iter().any(|e| e.label != Label::Skipped) {
        ("holdout", held)
    } else {
        ("train", train)
    };
    let scores = detector_scores(&run.model, &eval, &root)?;
    report(out, &format!("{prefix}_images"), scores.len())?;
    match (auc(&scores), det_curve(&scores)) {
        (Ok(area), Ok(curve)) => {
            report(out, &format!("{prefix}_auc"), format_sig(area, 6))?;
            report(out, &format!("{prefix}_eer"), format_sig(eer_from_vertices(&curve.points), 6))
        }
        _ => report(out, &format!("{prefix}_auc"), "undefined (single class)"),
    }
}

fn parse_constant_logits(s: &str) -> Option<Logits> {
    let (a, b) = s.split_once('=')?;
    let (a, b) = (a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?);
    (a.is_finite() && b.is_finite()).then(|| Logits::new(a, b))
}

fn score(a: ScoreArgs, out: &mut dyn Write) -> Result<()> {
    // (id, path) of every requested image
    let targets: Vec<(String, PathBuf)> = match &a.manifest {
        Some(m) => {
            let manifest = DatasetManifest::read(m)?;
            let root = parent_dir(m);
            manifest
                .entries
                .iter()
                .filter(|e| e.label != Label::Skipped)
                .map(|e| (e.output.clone(), root.join(&e.output)))
                .collect()
        }
        None => a.images.iter().map(|p| (p.to_string_lossy().into_owned(), p.clone())).collect(),
    };
    let records: Vec<ScoreRecord> = match (&a.model_file, &a.logits) {
        (Some(model_path), _) => {
            if targets.is_empty() {
                return Err(Error::Schema("no images to score".into()));
            }
            let model = BaselineModel::read(model_path)?;
            let images = targets.par_iter().map(|(_, p)| read_image(p)).collect::<Result<Vec<_>>>()?;
            let ids: Vec<String> = targets.iter().map(|(id, _)| id.clone()).collect();
            score_images(&model, &ids, &images)
        }
        (None, Some(spec)) => match parse_constant_logits(spec) {
            Some(logits) => {
                if targets.is_empty() {
                    return Err(Error::Schema("no images to score".into()));
                }
                targets.iter().map(|(id, _)| ScoreRecord::from_logits(id.clone(), logits)).collect()
            }
            None => {
                let ingested = read_scores(spec)?;
                if targets.is_empty() {
                    ingested
                } else {
                    let by_id: HashMap<&str, &ScoreRecord> = ingested.iter().map(|r| (r.id.as_str(), r)).collect();
                    targets
                        .iter()
                        .map(|(id, _)| {
                            by_id
                                .get(id.as_str())
                                .map(|r| (*r).clone())
                                .ok_or_else(|| Error::Schema(format!("no logits for {id:?}")))
                        })
                        .collect::<Result<_>>()?
                }
            }
        },
        (None, None) => return Err(Error::Schema("either --model-file or --logits is required".into())),
    };
    write_scores(&records, &a.out)?;
    report(out, "scores", records.len())?;
    report(out, "output", a.out.display())
}

/// Detector score for DET: the logit margin α − β when available, else 1 − nqm.
fn distortion_score(r: &ScoreRecord) -> f64 {
    match r.logits {
        Some(l) => l.alpha - l.beta,
        None => 1.0 - r.nqm,
    }
}

fn load_det_scores(a: &DetArgs) -> Result<Vec<LabeledScore>> {
    let text = read_text(&a.scores)?;
    let header = text.lines().next().unwrap_or_default().trim();
    if header == "id,score,label" {
        if a.manifest.is_some() {
            return Err(Error::Schema("labeled score files carry their own labels; drop --manifest".into()));
        }
        return parse_labeled_scores(&text);
    }
    let manifest_path = a
        .manifest
        .as_ref()
        .ok_or_else(|| Error::Schema("a score file needs --manifest for labels (or use id,score,label)".into()))?;
    let manifest = DatasetManifest::read(manifest_path)?;
    let labels: HashMap<&str, Class> = manifest
        .entries
        .iter()
        .filter_map(|e| match e.label {
            Label::Distorted => Some((e.output.as_str(), Class::Distorted)),
            Label::Undistorted => Some((e.output.as_str(), Class::Undistorted)),
            Label::Skipped => None,
        })
        .collect();
    radialkit::quality::parse_scores(&text)?
        .iter()
        .map(|r| {
            let label = labels
                .get(r.id.as_str())
                .ok_or_else(|| Error::Schema(format!("score id {:?} is not in the manifest", r.id)))?;
            Ok(LabeledScore::new(r.id.clone(), distortion_score(r), *label))
        })
        .collect()
}

fn det(a: DetArgs, out: &mut dyn Write) -> Result<()> {
    let scores = load_det_scores(&a)?;
    let curve = det_curve(&scores)?;
    curve.write_csv(&a.out)?;
    if let Some(svg) = &a.svg {
        curve.write_svg(svg)?;
    }
    report(out, "scores", scores.len())?;
    report(out, "vertices", curve.points.len())?;
    report(out, "eer", format_sig(eer_from_vertices(&curve.points), 6))?;
    report(out, "auc", format_sig(auc(&scores)?, 6))
}

fn edc(a: EdcArgs, out: &mut dyn Write) -> Result<()> {
    let comparisons = read_comparisons(&a.comparisons)?;
    let qualities: HashMap<String, f64> = read_scores(&a.qualities)?.into_iter().map(|r| (r.id, r.nqm)).collect();
    let (tau, calibrated) = match a.tau {
        Some(t) if t.is_finite() => (t, false),
        Some(t) => return Err(Error::Schema(format!("--tau {t} is not finite"))),
        None => (calibrate_threshold(&comparisons, a.start_fnmr)?.tau, true),
    };
    let curve = edc_curve(&comparisons, &qualities, tau)?;
    curve.write_csv(&a.out)?;
    if let Some(svg) = &a.svg {
        curve.write_svg(svg)?;
    }
    report(out, "tau", format!("{tau:?}"))?;
    report(out, "calibrated", calibrated)?;
    report(out, "mated", curve.samples)?;
    report(out, "starting_fnmr", format_sig(curve.points[0].1, 6))?;
    let last = curve.points.last().expect("curve has the zero-discard point");
    report(out, "final_discard", format_sig(last.0, 6))?;
    report(out, "final_fnmr", format_sig(last.1, 6))
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<()> {
    let (pairs, root) = match (&a.pairs, &a.manifest) {
        (Some(p), _) => (parse_pairs(&read_text(p)?)?, parent_dir(p)),
        (None, Some(m)) => (manifest_pairs(&DatasetManifest::read(m)?)?, parent_dir(m)),
        (None, None) => return Err(Error::Schema("either --pairs or --manifest is required".into())),
    };
    let policy = CropPolicy {
        default: a.crop,
        boxes: match &a.boxes {
            Some(path) => dataset::read_face_boxes(path)?,
            None => HashMap::new(),
        },
    };
    let result = compare_pairs(&pairs, &root, &policy)?;
    write_text(&a.out, &comparisons_to_csv(&result.records))?;
    for p in &result.degenerate {
        eprintln!("warning: no contrast in {} or {}; pair skipped", p.probe, p.reference);
    }
    let mut counts = BTreeMap::new();
    for r in &result.records {
        *counts.entry(r.mated).or_insert(0usize) += 1;
    }
    report(out, "comparisons", result.records.len())?;
    report(out, "mated", counts.get(&true).copied().unwrap_or(0))?;
    report(out, "non_mated", counts.get(&false).copied().unwrap_or(0))?;
    report(out, "degenerate", result.degenerate.len())?;
    report(out, "output", a.out.display())
}
