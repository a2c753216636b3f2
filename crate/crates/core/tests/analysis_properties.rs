// Null search, gradients and extinction on the preset designs and on
// configurations with closed-form answers.

use halbach::analysis::{
    approach_offsets, axial_gradient_at_null, extinction_distance, find_null, sample_line, AnalysisConfig, LineSpec,
};
use halbach::array::{build_dual_layer, Preset};
use halbach::magnetics::{field_jacobian, gauss_to_tesla, tesla_to_gauss, FieldSource, PointDipole, Vec3, MU0};
use halbach::Error;

const WINDOW: (f64, f64) = (10e-6, 10e-3);

#[test]
fn null_refinement_beats_bracketing_samples_and_is_pitch_stable() {
    for preset in Preset::ALL {
        let params = preset.params();
        let a = build_dual_layer(&params).unwrap();
        let y = params.ion_height;
        let cfg = AnalysisConfig::default();
        let n = find_null(&a, y, WINDOW, &cfg).unwrap();
        let z = n.position.z;
        let k = ((z - WINDOW.0) / cfg.scan_pitch).floor();
        for zs in [WINDOW.0 + k * cfg.scan_pitch, WINDOW.0 + (k + 1.0) * cfg.scan_pitch] {
            let b = a.field(&Vec3::new(0.0, y, zs)).unwrap().norm();
            assert!(n.residual_mag <= b, "{preset}: {} > {b}", n.residual_mag);
        }
        let fine = AnalysisConfig { scan_pitch: cfg.scan_pitch / 2.0, ..cfg };
        let n2 = find_null(&a, y, WINDOW, &fine).unwrap();
        assert!((n2.position.z - z).abs() <= 0.1e-6, "{preset}: {} vs {}", n2.position.z, z);
    }
}

#[test]
fn richardson_gradient_matches_plain_jacobian() {
    for preset in Preset::ALL {
        let params = preset.params();
        let a = build_dual_layer(&params).unwrap();
        let n = find_null(&a, params.ion_height, WINDOW, &AnalysisConfig::default()).unwrap();
        let rich = axial_gradient_at_null(&a, &n, 1e-6).unwrap();
        let plain = field_jacobian(&a, &n.position, 1e-6).unwrap()[(2, 2)];
        let plain_half = field_jacobian(&a, &n.position, 0.5e-6).unwrap()[(2, 2)];
        // plain differences converge to the extrapolated value at second order
        let (e1, e2) = ((plain - rich).abs(), (plain_half - rich).abs());
        assert!(e2 <= e1 + 1e-9 * rich.abs(), "{preset}: {e1:e} {e2:e}");
        assert!(e1 <= 1e-5 * rich.abs().max(1.0), "{preset}: {e1:e}");
        assert_eq!(n.axial_gradient, plain);
    }
}

#[test]
fn extinction_is_monotone_beyond_reported_distance() {
    let cfg = AnalysisConfig::default();
    for preset in [Preset::NaiveS2, Preset::OptimizedS3_1] {
        let params = preset.params();
        let a = build_dual_layer(&params).unwrap();
        let y = params.ion_height;
        let d = extinction_distance(&a, y, 1e-4, &cfg).unwrap();
        assert!(a.field(&Vec3::new(0.0, y, d)).unwrap().norm() >= 1e-4);
        let spec = LineSpec::new(Vec3::new(0.0, y, d + cfg.refine_tol), Vec3::new(0.0, y, cfg.extinction_window), 2000)
            .unwrap();
        let prof = sample_line(&a, &spec, false, 1e-6).unwrap();
        assert!(prof.b.iter().all(|b| b.norm() < 1e-4), "{preset}");
    }
}

#[test]
fn dipole_extinction_inverts_closed_form() {
    // On the dipole axis |B| = μ0 m / (2π z³).
    let m = 2e-3;
    let dip = PointDipole { position: Vec3::zeros(), moment: Vec3::new(0.0, 0.0, m) };
    let threshold = 1e-4;
    let d = extinction_distance(&dip, 0.0, threshold, &AnalysisConfig::default()).unwrap();
    let expected = (MU0 * m / (2.0 * std::f64::consts::PI * threshold)).cbrt();
    assert!((d - expected).abs() <= 0.01 * expected, "{d} vs {expected}");
}

#[test]
fn zero_remanence_never_reaches_threshold() {
    let mut params = Preset::NaiveS2.params();
    params.br_lower = 0.0;
    params.br_upper = 0.0;
    let a = build_dual_layer(&params).unwrap();
    let cfg = AnalysisConfig::default();
    assert_eq!(extinction_distance(&a, params.ion_height, 1e-4, &cfg), Err(Error::AlwaysBelowThreshold));
    assert!(matches!(find_null(&a, params.ion_height, WINDOW, &cfg), Err(Error::NoNullFound { .. })));
}

#[test]
fn approach_offsets_bound_the_null_residual() {
    for preset in Preset::ALL {
        let params = preset.params();
        let a = build_dual_layer(&params).unwrap();
        let cfg = AnalysisConfig::default();
        let n = find_null(&a, params.ion_height, WINDOW, &cfg).unwrap();
        let off = approach_offsets(&a, params.ion_height, 10e-3, &n, cfg.approach_pitch).unwrap();
        for i in 0..3 {
            assert!(off[i] >= n.residual_b[i].abs(), "{preset} axis {i}");
        }
        assert!(off.x <= 1e-7);
    }
}

#[test]
fn gauss_round_trip_does_not_drift() {
    assert_eq!(gauss_to_tesla(1.0), 1e-4);
    assert_eq!(tesla_to_gauss(1e-4), 1.0);
    assert_eq!(tesla_to_gauss(gauss_to_tesla(60.0)), 60.0);
    // one round trip may move a value by an ulp; repeating it must not walk
    for g0 in [1.0, 60.0, 0.25, 1e4, 123.456, -57.267, 3.3e-3] {
        let mut g = g0;
        for _ in 0..100 {
            g = tesla_to_gauss(gauss_to_tesla(g));
            assert!((g - g0).abs() <= f64::EPSILON * g0.abs(), "{g0} drifted to {g}");
        }
    }
}
