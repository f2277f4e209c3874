use std::fmt;
use std::str::FromStr;

use super::CurveSeries;
use crate::error::{Error, Result};

/// Ground-truth class of a scored image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Distorted,
    Undistorted,
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distorted" | "1" => Ok(Class::Distorted),
            "undistorted" | "0" => Ok(Class::Undistorted),
            _ => Err(Error::parse("class label", s)),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Distorted => "distorted",
            Class::Undistorted => "undistorted",
        })
    }
}

/// Detector score; higher means "more distorted".
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScore {
    pub id: String,
    pub score: f64,
    pub label: Class,
}

impl LabeledScore {
    pub fn new(id: impl Into<String>, score: f64, label: Class) -> Self {
        Self {
            id: id.into(),
            score,
            label,
        }
    }
}

fn class_counts(scores: &[LabeledScore]) -> Result<(usize, usize)> {
    if let Some(s) = scores.iter().find(|s| !s.score.is_finite()) {
        return Err(Error::Schema(format!("non-finite score for {:?}", s.id)));
    }
    let distorted = scores.iter().filter(|s| s.label == Class::Distorted).count();
    let undistorted = scores.len() - distorted;
    if distorted == 0 || undistorted == 0 {
        return Err(Error::SingleClass("DET needs distorted and undistorted scores".into()));
    }
    Ok((distorted, undistorted))
}

/// Detection error tradeoff vertices.
///
/// Images are flagged distorted when `score >= τ`. Sweeping τ from +∞ down
/// through every distinct score yields points `(FPR, FNR)`: the fraction of
/// undistorted images flagged and the fraction of distorted images missed.
/// Points are ordered by increasing FPR (non-decreasing; steps share an x)
/// and run from `(0, 1)` to `(1, 0)`.
pub fn det_curve(scores: &[LabeledScore]) -> Result<CurveSeries> {
    let (nd, nu) = class_counts(scores)?;
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut points = vec![(0.0, 1.0)];
    let (mut flagged_d, mut flagged_u) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let tau = sorted[i].score;
        while i < sorted.len() && sorted[i].score == tau {
            match sorted[i].label {
                Class::Distorted => flagged_d += 1,
                Class::Undistorted => flagged_u += 1,
            }
            i += 1;
        }
        points.push((flagged_u as f64 / nu as f64, (nd - flagged_d) as f64 / nd as f64));
    }
    Ok(CurveSeries {
        x_label: "false positive rate".into(),
        y_label: "false negative rate".into(),
        points,
        tau: None,
        samples: scores.len(),
    })
}

/// Equal error rate of a DET vertex sequence: the crossing of FPR and FNR,
/// linearly interpolated between the two vertices that bracket it.
pub fn eer_from_vertices(points: &[(f64, f64)]) -> f64 {
    let mut prev = points[0];
    for &(fpr, fnr) in points {
        if fpr >= fnr {
            let (pf, pn) = prev;
            let before = pn - pf;
            let after = fnr - fpr;
            if after == 0.0 || before <= 0.0 {
                return fpr;
            }
            let t = before / (before - after);
            return pf + t * (fpr - pf);
        }
        prev = (fpr, fnr);
    }
    // the last vertex is (1, 0), so the loop always returns
    unreachable!("DET vertices end at (1, 0)")
}

pub fn eer(scores: &[LabeledScore]) -> Result<f64> {
    Ok(eer_from_vertices(&det_curve(scores)?.points))
}

/// Area under the ROC curve: probability that a random distorted image
/// outscores a random undistorted one, ties counting one half.
pub fn auc(scores: &[LabeledScore]) -> Result<f64> {
    let (nd, nu) = class_counts(scores)?;
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    // midranks (1-based) of tied groups
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].score == sorted[i].score {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        rank_sum += midrank * sorted[i..j].iter().filter(|s| s.label == Class::Distorted).count() as f64;
        i = j;
    }
    let u = rank_sum - (nd * (nd + 1)) as f64 / 2.0;
    Ok(u / (nd * nu) as f64)
}

/// Parses CSV `id,score,label` with label `distorted`/`undistorted` (or 1/0).
pub fn parse_labeled_scores(text: &str) -> Result<Vec<LabeledScore>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "score", "label"] {
        return Err(Error::Schema("labeled score header must be id,score,label".into()));
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
            let bad = |what: &str| Error::Schema(format!("score line {}: invalid {what}", i + 2));
            let score = rec[1].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("score"))?;
            let label = rec[2].parse::<Class>().map_err(|_| bad("label"))?;
            Ok(LabeledScore::new(&rec[0], score, label))
        })
        .collect()
}

pub fn labeled_scores_to_csv(scores: &[LabeledScore]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["id", "score", "label"]).expect("in-memory write");
    for s in scores {
        w.write_record([s.id.clone(), format!("{:?}", s.score), s.label.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
