//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use radialkit::curves::{
    auc, calibrate_threshold, det_curve, edc_curve, edc_curve_at, eer, Class, ComparisonRecord, LabeledScore,
};
use radialkit::dataset::synth::{toy_capture, toy_face, write_toy_corpus};
use radialkit::dataset::{
    draw_lambda, generate, list_files, pipeline_pair, process_image, unit_interval, CropOrder, CropSpec,
    DatasetRecipe, GenerateOptions, Label,
};
use radialkit::geometry::{dm_distort, dm_undistort, kb_undistort, DistortionModel, KbVariant, NormPoint};
use radialkit::imaging::{psnr, warp, ImageBuffer, Interpolation, Rect, WarpSpec};
use radialkit::quality::{
    logistic_gradient, logistic_loss, manifest_features, nqm, train_logistic, BaselineConfig, Logits,
};
use radialkit_cli::commands::holdout_split;
use radialkit_cli::ToyEmbedding;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * unit_interval(self.0.next_u64())
    }

    fn below(&mut self, n: usize) -> usize {
        (self.range(0.0, n as f64) as usize).min(n - 1)
    }

    fn point(&mut self, max_r: f64) -> NormPoint {
        let r = max_r * self.range(0.0, 1.0).sqrt();
        let t = self.range(0.0, std::f64::consts::TAU);
        NormPoint::new(r * t.cos(), r * t.sin())
    }
}

fn test_images() -> Vec<ImageBuffer> {
    let mut imgs: Vec<ImageBuffer> = (0..4).map(|s| toy_face(100 + s, 96, 112)).collect();
    imgs.push(ImageBuffer::gray_from_fn(81, 64, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap());
    imgs
}

fn geometry_round_trip() -> Outcome {
    let start = Instant::now();
    let mut models: Vec<DistortionModel> = [0.3, 0.4, 0.6, 0.9]
        .into_iter()
        .map(|l| DistortionModel::division(l).unwrap())
        .collect();
    for v in KbVariant::ALL {
        for l in [1.0, 1.5, 2.5] {
            models.push(DistortionModel::kannala_brandt(v, l).unwrap());
        }
    }
    let mut rng = Uniform::new(1);
    let mut worst: f64 = 0.0;
    for m in &models {
        let reach = m.undistorted_radius(1.0).unwrap();
        for _ in 0..10_000 {
            let p = rng.point(0.99);
            let back = m.distort(m.undistort(p).unwrap()).unwrap();
            worst = worst.max((back.x - p.x).abs()).max((back.y - p.y).abs());
            // undistorted points exist only up to r_u(1)
            let q = NormPoint::new(p.x * reach, p.y * reach);
            let back = m.undistort(m.distort(q).unwrap()).unwrap();
            worst = worst.max((back.x - q.x).abs()).max((back.y - q.y).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-9 && elapsed < Duration::from_secs(1),
        format!("{} models x 10000 points both ways, max error {worst:.3e}, {elapsed:.2?}", models.len()),
    )
}

fn exact_identities() -> Outcome {
    let start = Instant::now();
    let models = [
        DistortionModel::division(0.0).unwrap(),
        DistortionModel::kannala_brandt(KbVariant::Equidistance, 1.0).unwrap(),
    ];
    let images = test_images();
    let mut identical = 0;
    let mut total = 0;
    for img in &images {
        for m in models {
            for spec in [WarpSpec::synthesize(m), WarpSpec::rectify(m)] {
                total += 1;
                let out = warp(img, &spec.with_interpolation(Interpolation::Nearest)).unwrap();
                identical += usize::from(out.image == *img);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        identical == total && elapsed < Duration::from_secs(1),
        format!("{identical}/{total} warps bit-identical on {} images, {elapsed:.2?}", images.len()),
    )
}

fn worked_examples() -> Outcome {
    let u = dm_undistort(NormPoint::new(0.6, 0.8), 0.5);
    let dm_ok = (u.x - 0.4).abs() <= 1e-12 && (u.y - 8.0 / 15.0).abs() <= 1e-12;
    // r_u = 2/3 at λ = 0.5 has distorted roots {1, 2}
    let root = dm_distort(NormPoint::new(2.0 / 3.0, 0.0), 0.5).unwrap();
    let root_ok = (root.x - 1.0).abs() <= 1e-12 && root.y == 0.0;
    let kb = kb_undistort(NormPoint::new(1.0, 0.0), KbVariant::Stereographic, 1.5, 1.0).unwrap();
    let kb_ok = (kb.x - 1.3909428).abs() <= 1e-6 && kb.y == 0.0;
    outcome(
        dm_ok && root_ok && kb_ok,
        format!(
            "dm_undistort ({:.15}, {:.15}); root {:.15}; kbs ({:.7}, {})",
            u.x, u.y, root.x, kb.x, kb.y
        ),
    )
}

fn nqm_properties() -> Outcome {
    let mut rng = Uniform::new(4);
    let equal_ok = [-1e6, -3.5, 0.0, 0.3, 42.0, 1e6]
        .iter()
        .all(|&v| nqm(Logits::new(v, v)) == 0.5);
    let mut shift_err: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b, c) = (rng.range(-20.0, 20.0), rng.range(-20.0, 20.0), rng.range(-500.0, 500.0));
        shift_err = shift_err.max((nqm(Logits::new(a, b)) - nqm(Logits::new(a + c, b + c))).abs());
    }
    let extreme = [nqm(Logits::new(1000.0, -1000.0)), nqm(Logits::new(1000.0, 0.0)), nqm(Logits::new(-1000.0, 1000.0))];
    let finite_ok = extreme.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v));
    let grid: Vec<f64> = (0..1000).map(|i| nqm(Logits::new(0.0, -20.0 + 40.0 * i as f64 / 999.0))).collect();
    let monotone = grid.windows(2).all(|w| w[1] > w[0]);
    outcome(
        equal_ok && shift_err <= 1e-12 && finite_ok && monotone,
        format!("alpha=beta exact: {equal_ok}; max shift error {shift_err:.1e}; alpha=1000 finite: {finite_ok}; strictly increasing on 1000-point grid of beta-alpha in [-20, 20]: {monotone}"),
    )
}

fn random_scores(rng: &mut Uniform) -> Vec<LabeledScore> {
    loop {
        let n = 2 + rng.below(11);
        let levels = 1 + rng.below(8);
        let scores: Vec<LabeledScore> = (0..n)
            .map(|i| {
                let label = if rng.range(0.0, 1.0) < 0.5 { Class::Distorted } else { Class::Undistorted };
                LabeledScore::new(format!("i{i}"), rng.below(levels) as f64 / levels as f64, label)
            })
            .collect();
        let distorted = scores.iter().filter(|s| s.label == Class::Distorted).count();
        if distorted > 0 && distorted < n {
            return scores;
        }
    }
}

fn random_comparisons(rng: &mut Uniform) -> (Vec<ComparisonRecord>, HashMap<String, f64>) {
    loop {
        let n = 1 + rng.below(12);
        let levels = 1 + rng.below(10);
        let comps: Vec<ComparisonRecord> = (0..n)
            .map(|_| {
                let probe = format!("p{}", rng.below(5));
                let reference = format!("r{}", rng.below(5));
                let sim = rng.below(levels) as f64 / levels as f64;
                ComparisonRecord::new(probe, reference, sim, rng.range(0.0, 1.0) < 0.8)
            })
            .collect();
        if comps.iter().any(|c| c.mated) {
            let qualities = (0..5)
                .flat_map(|i| [format!("p{i}"), format!("r{i}")])
                .map(|id| (id, rng.below(4) as f64 / 4.0))
                .collect();
            return (comps, qualities);
        }
    }
}

fn curve_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = Uniform::new(5);
    let mut mismatches = BTreeMap::from([("det", 0), ("eer", 0), ("calibrate", 0), ("edc", 0)]);
    for _ in 0..1000 {
        let scores = random_scores(&mut rng);
        let vertices = oracle::det_vertices(&scores);
        if det_curve(&scores).unwrap().points != vertices {
            *mismatches.get_mut("det").unwrap() += 1;
        }
        if eer(&scores).unwrap() != oracle::eer(&vertices) {
            *mismatches.get_mut("eer").unwrap() += 1;
        }

        let (comps, qualities) = random_comparisons(&mut rng);
        let target = rng.range(0.01, 0.99);
        let cal = calibrate_threshold(&comps, target).unwrap();
        if (cal.tau, cal.fnmr) != oracle::calibrate(&comps, target) {
            *mismatches.get_mut("calibrate").unwrap() += 1;
        }
        let tau = rng.below(11) as f64 / 10.0;
        let n = comps.iter().filter(|c| c.mated).count();
        let curve = edc_curve(&comps, &qualities, tau).unwrap();
        if curve.points != oracle::edc(&comps, &qualities, tau, &oracle::edc_grid_counts(n)) {
            *mismatches.get_mut("edc").unwrap() += 1;
        }
    }
    let elapsed = start.elapsed();
    let total: usize = mismatches.values().sum();
    outcome(
        total == 0 && elapsed < Duration::from_secs(10),
        format!("1000 random instances (size <= 12), mismatches {mismatches:?}, {elapsed:.2?}"),
    )
}

fn edc_worked_example() -> Outcome {
    let sims = [0.2, 0.9, 0.3, 0.8];
    let comps: Vec<ComparisonRecord> = sims
        .iter()
        .enumerate()
        .map(|(i, &s)| ComparisonRecord::new(format!("p{}", i + 1), "gallery", s, true))
        .collect();
    let mut q: HashMap<String, f64> = (1..=4).map(|i| (format!("p{i}"), i as f64 / 10.0)).collect();
    q.insert("gallery".into(), 1.0);
    let curve = edc_curve_at(&comps, &q, 0.5, &[0.0, 0.25, 0.5]).unwrap();
    let expected = vec![(0.0, 0.5), (0.25, 1.0 / 3.0), (0.5, 0.5)];
    outcome(curve.points == expected, format!("points {:?}", curve.points))
}

fn crop_order() -> Outcome {
    let img = toy_face(7, 256, 256);
    let mut cells = Vec::new();
    for c in [0.3, 0.5, 0.7] {
        for lambda in [0.3, 0.5, 0.9] {
            let s = pipeline_pair(&img, lambda, &CropSpec::Centered { fraction: c }).unwrap().stats;
            cells.push((c, lambda, s.crop_first_displacement, s.distort_first_displacement));
        }
    }
    let wins = cells.iter().filter(|c| c.2 > c.3).count();
    let min_ratio = cells.iter().map(|c| c.2 / c.3).fold(f64::INFINITY, f64::min);
    outcome(
        wins == 9,
        format!("{wins}/9 cells crop-first > distort-first mean displacement (px), smallest ratio {min_ratio:.2}"),
    )
}

fn round_trip_fidelity() -> Outcome {
    let m = DistortionModel::division(0.4).unwrap();
    let mut margins = Vec::new();
    for img in test_images() {
        let region = Rect::central(img.width(), img.height(), 0.6);
        let distorted = warp(&img, &WarpSpec::synthesize(m)).unwrap().image;
        let restored = warp(&distorted, &WarpSpec::rectify(m)).unwrap().image;
        let before = psnr(&distorted, &img, region).unwrap();
        let after = psnr(&restored, &img, region).unwrap();
        margins.push(after - before);
    }
    let formatted: Vec<String> = margins.iter().map(|m| format!("{m:.2}")).collect();
    outcome(
        margins.iter().all(|&m| m > 0.0),
        format!("PSNR gain (dB, central 60%) per image: [{}]", formatted.join(", ")),
    )
}

fn baseline_run(root: &Path, src: &Path, lambda: f64) -> (f64, f64) {
    let out = root.join(format!("dm{lambda}"));
    let mut recipe = DatasetRecipe::fixed(format!("dm{lambda}"), src, DistortionModel::division(lambda).unwrap());
    recipe.emit_undistorted = true;
    let manifest = generate(&recipe, &out, &GenerateOptions::default()).unwrap();
    let (train, held) = holdout_split(&manifest, 0.3, 11).unwrap();
    let config = BaselineConfig::default();
    let (_, features, labels) = manifest_features(&train, &out, config.annuli).unwrap();
    let model = train_logistic(&features, &labels, &config).unwrap().model;
    let (ids, features, labels) = manifest_features(&held, &out, config.annuli).unwrap();
    let scores: Vec<LabeledScore> = ids
        .into_iter()
        .zip(features.iter().zip(labels))
        .map(|(id, (f, d))| {
            LabeledScore::new(id, model.decision(f), if d { Class::Distorted } else { Class::Undistorted })
        })
        .collect();
    (auc(&scores).unwrap(), eer(&scores).unwrap())
}

fn baseline_detector() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("faces");
    write_toy_corpus(&src, 100, 96, 112, 2024).unwrap();
    let (auc_strong, eer_strong) = baseline_run(dir.path(), &src, 0.9);
    let (auc_weak, eer_weak) = baseline_run(dir.path(), &src, 0.3);
    let elapsed = start.elapsed();
    outcome(
        auc_strong > 0.9 && eer_strong < 0.15 && auc_weak > 0.6 && elapsed < Duration::from_secs(60),
        format!(
            "100 sources, 70/30 split by source: dm:0.9 AUC {auc_strong:.3} EER {eer_strong:.3}; dm:0.3 AUC {auc_weak:.3} EER {eer_weak:.3}; {elapsed:.2?}"
        ),
    )
}

const FACE_CROP: CropSpec = CropSpec::Centered { fraction: 0.6 };

fn toy_similarity(probe: &ImageBuffer, reference: &ImageBuffer) -> f64 {
    ToyEmbedding::from_image(probe)
        .unwrap()
        .similarity(&ToyEmbedding::from_image(reference).unwrap())
        .expect("toy faces have contrast")
}

fn subject(i: usize) -> u64 {
    5000 + i as u64
}

fn reference_image(i: usize) -> ImageBuffer {
    radialkit::dataset::crop(&toy_face(subject(i), 128, 128), &FACE_CROP).unwrap().image
}

/// Mated comparisons of an undistorted second capture against the cropped
/// canonical capture: the toy recognizer's native operating conditions.
fn toy_frs_clean(subjects: usize) -> Vec<ComparisonRecord> {
    (0..subjects)
        .map(|i| {
            let probe = radialkit::dataset::crop(&toy_capture(subject(i), 1, 128, 128), &FACE_CROP).unwrap().image;
            ComparisonRecord::new(format!("s{i}/probe"), format!("s{i}/reference"), toy_similarity(&probe, &reference_image(i)), true)
        })
        .collect()
}

/// The same comparisons with the probe distorted at a random λ in [0.1, 0.9]
/// using one crop/distort order. Probe quality is 1 − λ.
fn toy_frs(order: CropOrder, subjects: usize) -> (Vec<ComparisonRecord>, HashMap<String, f64>) {
    let mut comps = Vec::new();
    let mut quality = HashMap::new();
    for i in 0..subjects {
        let lambda = draw_lambda(99, i as u64, 0.1, 0.9).unwrap();
        let spec = WarpSpec::synthesize(DistortionModel::division(lambda).unwrap());
        let probe = process_image(&toy_capture(subject(i), 1, 128, 128), &spec, Some(&FACE_CROP), order).unwrap().image;
        let (pid, rid) = (format!("s{i}/probe"), format!("s{i}/reference"));
        quality.insert(pid.clone(), 1.0 - lambda);
        quality.insert(rid.clone(), 1.0);
        comps.push(ComparisonRecord::new(pid, rid, toy_similarity(&probe, &reference_image(i)), true));
    }
    (comps, quality)
}

struct EdcStudy {
    start: f64,
    half: f64,
}

impl EdcStudy {
    fn new(comps: &[ComparisonRecord], quality: &HashMap<String, f64>, tau: f64) -> Self {
        let curve = edc_curve_at(comps, quality, tau, &[0.0, 0.5]).unwrap();
        Self {
            start: curve.points[0].1,
            half: curve.points[1].1,
        }
    }

    fn change(&self) -> f64 {
        self.start - self.half
    }
}

fn edc_direction() -> Outcome {
    let subjects = 200;
    // one recognizer, one threshold: FNMR 0.05 on undistorted probes
    let tau = calibrate_threshold(&toy_frs_clean(subjects), 0.05).unwrap().tau;
    let (crop_first, q1) = toy_frs(CropOrder::CropThenDistort, subjects);
    let (distort_first, q2) = toy_frs(CropOrder::DistortThenCrop, subjects);
    let c = EdcStudy::new(&crop_first, &q1, tau);
    let d = EdcStudy::new(&distort_first, &q2, tau);
    outcome(
        c.change() >= 0.05 && d.change().abs() < c.change().abs(),
        format!(
            "{subjects} subjects, tau {tau:.4} (FNMR 0.05 undistorted); crop-first FNMR {:.3} -> {:.3} at d=0.5; distort-first {:.3} -> {:.3}",
            c.start, c.half, d.start, d.half
        ),
    )
}

fn dataset_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("faces");
    write_toy_corpus(&src, 20, 64, 72, 77).unwrap();
    let recipe = dir.path().join("recipe.txt");
    std::fs::write(
        &recipe,
        "name = mixed\nsource_dir = faces\nmodel = dm\nlambda_min = 0.1\nlambda_max = 0.9\nseed = 314\nemit_undistorted = true\n",
    )
    .unwrap();
    let run = |out: &str, jobs: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_radialkit"))
            .args(["gen-dataset", recipe.to_str().unwrap(), "--out", dir.path().join(out).to_str().unwrap(), "--jobs", jobs])
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        let root = dir.path().join(out);
        list_files(&root)
            .unwrap()
            .into_iter()
            .map(|rel| {
                let bytes = std::fs::read(root.join(&rel)).unwrap();
                (rel, bytes)
            })
            .collect::<BTreeMap<_, _>>()
    };
    let a = run("a", "1");
    let b = run("b", "4");
    let manifest = radialkit::dataset::DatasetManifest::parse(std::str::from_utf8(&a["manifest.csv"]).unwrap()).unwrap();
    let distorted = manifest.count(Label::Distorted);
    outcome(
        a == b && distorted == 20,
        format!("{} files, {distorted} distorted; trees identical across runs (1 vs 4 threads): {}", a.len(), a == b),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = Uniform::new(12);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = 2 + rng.below(10);
        let d = 1 + rng.below(6);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.range(-2.0, 2.0)).chain([1.0]).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| if rng.range(0.0, 1.0) < 0.5 { 0.0 } else { 1.0 }).collect();
        let w: Vec<f64> = (0..=d).map(|_| rng.range(-1.5, 1.5)).collect();
        let analytic = logistic_gradient(&w, &x, &y);
        let numeric: Vec<f64> = (0..w.len())
            .map(|j| {
                let (mut plus, mut minus) = (w.clone(), w.clone());
                plus[j] += h;
                minus[j] -= h;
                (logistic_loss(&plus, &x, &y) - logistic_loss(&minus, &x, &y)) / (2.0 * h)
            })
            .collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-12));
    }
    outcome(worst < 1e-6, format!("100 problems, max relative error {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("geometry round-trip", geometry_round_trip),
        ("exact identity warps", exact_identities),
        ("worked numeric examples", worked_examples),
        ("NQM properties", nqm_properties),
        ("curve oracles", curve_oracles),
        ("EDC worked example", edc_worked_example),
        ("crop-order displacement", crop_order),
        ("round-trip fidelity", round_trip_fidelity),
        ("baseline detector", baseline_detector),
        ("EDC direction (crop-first vs distort-first)", edc_direction),
        ("dataset determinism", dataset_determinism),
        ("gradient check", gradient_check),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let result = check();
        println!("criterion {:>2} {}: {} ({})", i + 1, if result.pass { "PASS" } else { "FAIL" }, name, result.detail);
        failed += usize::from(!result.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
