use proptest::prelude::*;
use radialkit::geometry::{DistortionModel, KbVariant, NormPoint};

fn models() -> Vec<DistortionModel> {
    let mut out: Vec<DistortionModel> = [0.0, 0.3, 0.4, 0.6, 0.9]
        .into_iter()
        .map(|l| DistortionModel::division(l).unwrap())
        .collect();
    for v in KbVariant::ALL {
        for l in [1.0, 1.5, 2.5] {
            out.push(DistortionModel::kannala_brandt(v, l).unwrap());
        }
    }
    out
}

fn point_in_disk(max_r: f64) -> impl Strategy<Value = NormPoint> {
    (0.0..=max_r, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| NormPoint::new(r * t.cos(), r * t.sin()))
}

fn assert_close(a: NormPoint, b: NormPoint, tol: f64) -> Result<(), TestCaseError> {
    prop_assert!((a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol, "{a:?} vs {b:?}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn undistort_then_distort(p in point_in_disk(0.99)) {
        for m in models() {
            let u = m.undistort(p).unwrap();
            assert_close(m.distort(u).unwrap(), p, 1e-9)?;
        }
    }

    #[test]
    fn distort_then_undistort(p in point_in_disk(0.99)) {
        for m in models() {
            // undistorted points are only reachable up to r_u(1)
            let reach = m.undistorted_radius(1.0).unwrap();
            let q = NormPoint::new(p.x * reach, p.y * reach);
            let d = m.distort(q).unwrap();
            assert_close(m.undistort(d).unwrap(), q, 1e-9)?;
        }
    }

    #[test]
    fn rotation_commutes(p in point_in_disk(0.99), angle in 0.0..std::f64::consts::TAU) {
        let (s, c) = angle.sin_cos();
        let rot = |q: NormPoint| NormPoint::new(c * q.x - s * q.y, s * q.x + c * q.y);
        for m in models() {
            assert_close(m.undistort(rot(p)).unwrap(), rot(m.undistort(p).unwrap()), 1e-12)?;
            let q = m.undistort(p).unwrap();
            assert_close(m.distort(rot(q)).unwrap(), rot(m.distort(q).unwrap()), 1e-12)?;
        }
    }
}

#[test]
fn identity_models_are_exact() {
    let ids = [
        DistortionModel::division(0.0).unwrap(),
        DistortionModel::kannala_brandt(KbVariant::Equidistance, 1.0).unwrap(),
    ];
    for m in ids {
        for i in 0..200 {
            let t = i as f64 * 0.731;
            let p = NormPoint::new(0.99 * t.cos() * (i as f64 / 200.0), 0.99 * t.sin() * (i as f64 / 200.0));
            assert_eq!(m.undistort(p).unwrap(), p);
            assert_eq!(m.distort(p).unwrap(), p);
        }
    }
}

#[test]
fn center_is_fixed() {
    for m in models() {
        assert_eq!(m.undistort(NormPoint::ORIGIN).unwrap(), NormPoint::ORIGIN);
        assert_eq!(m.distort(NormPoint::ORIGIN).unwrap(), NormPoint::ORIGIN);
    }
}

#[test]
fn division_radius_is_increasing_on_unit_interval() {
    for lambda in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.999] {
        let m = DistortionModel::division(lambda).unwrap();
        let mut prev = -1.0;
        for i in 0..=100_000 {
            let r = m.undistorted_radius(i as f64 / 100_000.0).unwrap();
            assert!(r > prev, "lambda {lambda} at step {i}");
            prev = r;
        }
    }
}

#[test]
fn kb_small_angle_slope() {
    let h = 1e-6;
    for v in KbVariant::ALL {
        for (lambda, focal) in [(1.0, 1.0), (1.5, 1.0), (2.5, 1.0), (1.5, 2.0)] {
            let m = DistortionModel::kannala_brandt_with_focal(v, lambda, focal).unwrap();
            let slope = m.undistorted_radius(h).unwrap() / h;
            let expected = lambda / focal;
            assert!(((slope - expected) / expected).abs() < 1e-6, "{m}: {slope}");
        }
    }
}
