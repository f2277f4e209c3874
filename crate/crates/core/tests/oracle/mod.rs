//! Exhaustive reference implementations for the curve module.
//!
//! Everything here is computed by direct counting over all candidates, with
//! no sorting-based sweeps, so it shares no code paths with the library.
#![allow(dead_code)]

use std::collections::HashMap;

use radialkit::curves::{Class, ComparisonRecord, LabeledScore};

pub fn det_vertices(scores: &[LabeledScore]) -> Vec<(f64, f64)> {
    let nd = scores.iter().filter(|s| s.label == Class::Distorted).count();
    let nu = scores.len() - nd;
    let mut taus: Vec<f64> = vec![f64::INFINITY];
    for s in scores {
        if !taus.contains(&s.score) {
            taus.push(s.score);
        }
    }
    // descending, by selection
    let mut ordered = Vec::new();
    while !taus.is_empty() {
        let (i, _) = taus
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &t)| if t > best.1 { (i, t) } else { best });
        ordered.push(taus.remove(i));
    }
    ordered
        .into_iter()
        .map(|tau| {
            let fp = scores.iter().filter(|s| s.label == Class::Undistorted && s.score >= tau).count();
            let fneg = scores.iter().filter(|s| s.label == Class::Distorted && s.score < tau).count();
            (fp as f64 / nu as f64, fneg as f64 / nd as f64)
        })
        .collect()
}

/// Crossing of FPR and FNR along the vertex polyline.
pub fn eer(vertices: &[(f64, f64)]) -> f64 {
    for i in 0..vertices.len() {
        let (fpr, fnr) = vertices[i];
        if fpr >= fnr {
            if i == 0 || fpr == fnr {
                return fpr;
            }
            let (pf, pn) = vertices[i - 1];
            let before = pn - pf;
            let after = fnr - fpr;
            let t = before / (before - after);
            return pf + t * (fpr - pf);
        }
    }
    unreachable!("DET ends at (1, 0)")
}

pub fn fnmr_at(mated: &[f64], tau: f64) -> f64 {
    mated.iter().filter(|&&s| s < tau).count() as f64 / mated.len() as f64
}

pub fn calibrate(comparisons: &[ComparisonRecord], target: f64) -> (f64, f64) {
    let mated: Vec<f64> = comparisons.iter().filter(|c| c.mated).map(|c| c.similarity).collect();
    let max = mated.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates = mated.clone();
    candidates.push(max.next_up());
    let mut best: Option<(f64, f64)> = None;
    for &tau in &candidates {
        let fnmr = fnmr_at(&mated, tau);
        let replace = match best {
            None => true,
            Some((bt, bf)) => {
                let (d, bd) = ((fnmr - target).abs(), (bf - target).abs());
                d < bd
                    || (d == bd && fnmr >= target && bf < target)
                    || (d == bd && (fnmr >= target) == (bf >= target) && tau < bt)
            }
        };
        if replace {
            best = Some((tau, fnmr));
        }
    }
    best.unwrap()
}

fn key_less(a: (f64, &ComparisonRecord, usize), b: (f64, &ComparisonRecord, usize)) -> bool {
    (a.0, &a.1.probe, &a.1.reference, a.2) < (b.0, &b.1.probe, &b.1.reference, b.2)
}

/// EDC by rank counting: a comparison is discarded at step `m` when fewer
/// than `m` comparisons precede it in (quality, probe, reference, position).
pub fn edc(comparisons: &[ComparisonRecord], qualities: &HashMap<String, f64>, tau: f64, counts: &[usize]) -> Vec<(f64, f64)> {
    let mated: Vec<(f64, &ComparisonRecord, usize)> = comparisons
        .iter()
        .filter(|c| c.mated)
        .enumerate()
        .map(|(i, c)| (qualities[&c.probe].min(qualities[&c.reference]), c, i))
        .collect();
    let n = mated.len();
    let rank = |i: usize| mated.iter().filter(|&&other| key_less(other, mated[i])).count();
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for &m in counts {
        if m >= n || seen.contains(&m) {
            continue;
        }
        seen.push(m);
        let retained: Vec<usize> = (0..n).filter(|&i| rank(i) >= m).collect();
        let errors = retained.iter().filter(|&&i| mated[i].1.similarity < tau).count();
        out.push((m as f64 / n as f64, errors as f64 / retained.len() as f64));
    }
    out
}

pub fn edc_grid_counts(n: usize) -> Vec<usize> {
    (0..50).map(|k| k * n / 50).collect()
}
