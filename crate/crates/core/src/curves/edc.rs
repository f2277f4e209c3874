use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::Path;

use super::CurveSeries;
use crate::error::{Error, Result};

/// One biometric comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub probe: String,
    pub reference: String,
    /// Higher means more similar.
    pub similarity: f64,
    pub mated: bool,
}

impl ComparisonRecord {
    pub fn new(probe: impl Into<String>, reference: impl Into<String>, similarity: f64, mated: bool) -> Self {
        Self {
            probe: probe.into(),
            reference: reference.into(),
            similarity,
            mated,
        }
    }
}

/// Threshold chosen for a target starting FNMR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub tau: f64,
    /// FNMR actually reached at `tau` (mated similarities below `tau`).
    pub fnmr: f64,
    pub mated: usize,
}

fn mated_similarities(comparisons: &[ComparisonRecord]) -> Result<Vec<f64>> {
    let sims: Vec<f64> = comparisons.iter().filter(|c| c.mated).map(|c| c.similarity).collect();
    if sims.is_empty() {
        return Err(Error::NoMated);
    }
    if sims.iter().any(|s| !s.is_finite()) {
        return Err(Error::Schema("non-finite similarity".into()));
    }
    Ok(sims)
}

/// Picks τ so that the fraction of mated similarities below τ is as close as
/// possible to `target`.
///
/// Candidates are every distinct mated similarity plus the next float above
/// the largest (which rejects everything). Ties in distance prefer the
/// candidate at or above the target, then the smaller τ.
pub fn calibrate_threshold(comparisons: &[ComparisonRecord], target: f64) -> Result<Calibration> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Schema(format!("target FNMR {target} outside (0, 1)")));
    }
    let mut sims = mated_similarities(comparisons)?;
    sims.sort_by(f64::total_cmp);
    let n = sims.len();
    let mut best: Option<(f64, bool, Calibration)> = None;
    let mut below = 0;
    let candidates = sims.iter().copied().chain(std::iter::once(sims[n - 1].next_up()));
    let mut last = None;
    for tau in candidates {
        if last == Some(tau) {
            continue;
        }
        last = Some(tau);
        while below < n && sims[below] < tau {
            below += 1;
        }
        let fnmr = below as f64 / n as f64;
        let dist = (fnmr - target).abs();
        let under = fnmr < target;
        let better = match &best {
            None => true,
            Some((d, u, _)) => match dist.total_cmp(d) {
                Ordering::Less => true,
                Ordering::Equal => *u && !under,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((dist, under, Calibration { tau, fnmr, mated: n }));
        }
    }
    Ok(best.expect("at least one candidate").2)
}

fn quality_of(qualities: &HashMap<String, f64>, id: &str) -> Result<f64> {
    match qualities.get(id) {
        Some(q) if q.is_finite() => Ok(*q),
        Some(_) => Err(Error::Schema(format!("non-finite quality for {id:?}"))),
        None => Err(Error::MissingQuality(id.to_string())),
    }
}

/// Mated comparisons in discard order: lowest pairwise quality first,
/// ties broken by (probe, reference), then input order.
fn discard_order<'a>(comparisons: &'a [ComparisonRecord], qualities: &HashMap<String, f64>) -> Result<Vec<(f64, &'a ComparisonRecord)>> {
    let mut mated = Vec::new();
    for c in comparisons {
        let q = quality_of(qualities, &c.probe)?.min(quality_of(qualities, &c.reference)?);
        if c.mated {
            mated.push((q, c));
        }
    }
    if mated.is_empty() {
        return Err(Error::NoMated);
    }
    mated.sort_by(|(qa, a), (qb, b)| {
        qa.total_cmp(qb)
            .then_with(|| a.probe.cmp(&b.probe))
            .then_with(|| a.reference.cmp(&b.reference))
    });
    Ok(mated)
}

fn edc_series(ordered: &[(f64, &ComparisonRecord)], tau: f64, discard_counts: impl Iterator<Item = usize>) -> CurveSeries {
    let n = ordered.len();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut last = None;
    for m in discard_counts {
        if m >= n || last == Some(m) {
            continue;
        }
        last = Some(m);
        let retained = &ordered[m..];
        let errors = retained.iter().filter(|(_, c)| c.similarity < tau).count();
        points.push((m as f64 / n as f64, errors as f64 / retained.len() as f64));
    }
    CurveSeries {
        x_label: "discard fraction".into(),
        y_label: "FNMR".into(),
        points,
        tau: Some(tau),
        samples: n,
    }
}

/// Number of discard steps on the default grid `{0, 0.02, …, 0.98}`.
pub const EDC_GRID_STEPS: usize = 50;

/// Error-versus-discard curve on the default 2% grid.
///
/// Pairwise quality is the minimum of the probe and reference qualities. At
/// grid fraction `k/50` the `⌊k·n/50⌋` lowest-quality mated comparisons are
/// dropped and the FNMR at `tau` (similarity below `tau`) is measured on the
/// rest. Each point's x is the fraction actually discarded; grid steps that
/// discard the same count collapse to one point.
pub fn edc_curve(comparisons: &[ComparisonRecord], qualities: &HashMap<String, f64>, tau: f64) -> Result<CurveSeries> {
    let ordered = discard_order(comparisons, qualities)?;
    let n = ordered.len();
    Ok(edc_series(&ordered, tau, (0..EDC_GRID_STEPS).map(|k| k * n / EDC_GRID_STEPS)))
}

/// Error-versus-discard curve at explicit discard fractions (`⌊d·n⌋` dropped).
/// Fractions that would discard every comparison are omitted.
pub fn edc_curve_at(comparisons: &[ComparisonRecord], qualities: &HashMap<String, f64>, tau: f64, fractions: &[f64]) -> Result<CurveSeries> {
    if let Some(d) = fractions.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::Schema(format!("discard fraction {d} outside [0, 1]")));
    }
    let ordered = discard_order(comparisons, qualities)?;
    let n = ordered.len();
    let mut counts: Vec<usize> = fractions.iter().map(|d| (d * n as f64).floor() as usize).collect();
    counts.sort_unstable();
    Ok(edc_series(&ordered, tau, counts.into_iter()))
}

/// Parses CSV `probe,reference,similarity,mated` (mated ∈ {0, 1}).
pub fn parse_comparisons(text: &str) -> Result<Vec<ComparisonRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["probe", "reference", "similarity", "mated"] {
        return Err(Error::Schema("comparison header must be probe,reference,similarity,mated".into()));
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
            let bad = |what: &str| Error::Schema(format!("comparison line {}: invalid {what}", i + 2));
            let similarity = rec[2].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("similarity"))?;
            let mated = match &rec[3] {
                "1" => true,
                "0" => false,
                _ => return Err(bad("mated flag")),
            };
            Ok(ComparisonRecord::new(&rec[0], &rec[1], similarity, mated))
        })
        .collect()
}

pub fn read_comparisons(path: impl AsRef<Path>) -> Result<Vec<ComparisonRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_comparisons(&text)
}

pub fn comparisons_to_csv(records: &[ComparisonRecord]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["probe", "reference", "similarity", "mated"]).expect("in-memory write");
    for c in records {
        w.write_record([
            c.probe.as_str(),
            c.reference.as_str(),
            &format!("{:?}", c.similarity),
            if c.mated { "1" } else { "0" },
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
