use std::collections::HashMap;

use criterion::{criterion_group, criterion_main, Criterion};
use radialkit::curves::{auc, calibrate_threshold, det_curve, edc_curve, Class, ComparisonRecord, LabeledScore};

fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn bench_det(c: &mut Criterion) {
    let mut s = 1;
    let scores: Vec<_> = (0..20_000)
        .map(|i| {
            let label = if i % 2 == 0 { Class::Distorted } else { Class::Undistorted };
            let shift = if label == Class::Distorted { 0.3 } else { 0.0 };
            LabeledScore::new(format!("s{i}"), lcg(&mut s) + shift, label)
        })
        .collect();
    c.bench_function("det_curve_20k", |b| b.iter(|| det_curve(&scores).unwrap()));
    c.bench_function("auc_20k", |b| b.iter(|| auc(&scores).unwrap()));
}

fn bench_edc(c: &mut Criterion) {
    let mut s = 2;
    let n = 10_000;
    let records: Vec<_> = (0..n)
        .map(|i| ComparisonRecord::new(format!("p{i}"), format!("r{i}"), lcg(&mut s), i % 4 != 0))
        .collect();
    let mut qualities = HashMap::new();
    for i in 0..n {
        qualities.insert(format!("p{i}"), lcg(&mut s));
        qualities.insert(format!("r{i}"), lcg(&mut s));
    }
    c.bench_function("calibrate_10k", |b| b.iter(|| calibrate_threshold(&records, 0.05).unwrap()));
    let tau = calibrate_threshold(&records, 0.05).unwrap().tau;
    c.bench_function("edc_curve_10k", |b| b.iter(|| edc_curve(&records, &qualities, tau).unwrap()));
}

criterion_group!(benches, bench_det, bench_edc);
criterion_main!(benches);
