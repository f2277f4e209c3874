use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use radialkit::dataset::synth::toy_face;
use radialkit::imaging::{warp, Interpolation, WarpSpec};
use radialkit::{DistortionModel, KbVariant};

fn bench_warp(c: &mut Criterion) {
    let img = toy_face(7, 256, 256);
    let mut group = c.benchmark_group("warp_256");
    let models = [
        ("dm", DistortionModel::division(0.5).unwrap()),
        ("kbs", DistortionModel::kannala_brandt(KbVariant::Stereographic, 1.5).unwrap()),
    ];
    for (name, model) in models {
        for interp in [Interpolation::Bilinear, Interpolation::Nearest] {
            let spec = WarpSpec::synthesize(model).with_interpolation(interp);
            group.bench_with_input(BenchmarkId::new(name, format!("{interp:?}")), &spec, |b, spec| {
                b.iter(|| warp(&img, spec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_warp);
criterion_main!(benches);
