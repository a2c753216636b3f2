// Multi-module scenes: composition linearity, yaw equivariance, crosstalk
// between modules and the nine-junction preset.

use halbach::analysis::{find_null, AnalysisConfig};
use halbach::array::{build_dual_layer, Preset};
use halbach::magnetics::{FieldSource, Vec3};
use halbach::scene::{
    compose_scene, corridor_report, nine_junction_preset, ModulePlacement, Scene, Yaw, DEFAULT_CORRIDOR_PITCH,
    DEFAULT_FLAG_THRESHOLD, MIN_MODULE_PITCH,
};
use halbach::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WINDOW: (f64, f64) = (10e-6, 10e-3);

fn exterior(a: &halbach::Assembly, p: &Vec3) -> bool {
    a.magnets().iter().all(|m| m.shape().max_plane_distance(p) > 1e-5)
}

#[test]
fn identity_placement_matches_bare_preset() {
    let d = Preset::OptimizedS3_1.params();
    let bare = build_dual_layer(&d).unwrap();
    let placed = compose_scene(&[ModulePlacement::new("m", d, Vec3::zeros(), Yaw::Deg0)]).unwrap();
    for i in 0..50 {
        let p = Vec3::new(0.1e-3 * i as f64, 0.5e-3, 0.2e-3 + 0.1e-3 * i as f64);
        assert_eq!(bare.field(&p).unwrap().as_slice(), placed.field(&p).unwrap().as_slice());
    }
}

#[test]
fn two_modules_superpose() {
    let a = ModulePlacement::new("a", Preset::NaiveS2.params(), Vec3::new(-4e-3, 0.0, 0.0), Yaw::Deg0);
    let b = ModulePlacement::new("b", Preset::RhombicS3.params(), Vec3::new(6e-3, 0.0, 8e-3), Yaw::Deg90);
    let (aa, ab) = (a.assembly().unwrap(), b.assembly().unwrap());
    let scene = compose_scene(&[a, b]).unwrap();
    assert_eq!(scene.len(), aa.len() + ab.len());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut n = 0;
    while n < 100 {
        let p = Vec3::new(rng.gen_range(-12.0..14.0), rng.gen_range(-1.0..3.0), rng.gen_range(-6.0..14.0)) * 1e-3;
        if !exterior(&scene, &p) {
            continue;
        }
        let parts = aa.field(&p).unwrap() + ab.field(&p).unwrap();
        let total = scene.field(&p).unwrap();
        assert!((total - parts).norm() <= 1e-12 * parts.norm(), "at {p:?}");
        n += 1;
    }
}

#[test]
fn yaw_placements_are_equivariant() {
    let d = Preset::RhombicS3.params();
    let bare = build_dual_layer(&d).unwrap();
    let t = Vec3::new(3e-3, 0.0, -7e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for yaw in [Yaw::Deg90, Yaw::Deg180, Yaw::Deg270] {
        let placed = ModulePlacement::new("m", d, t, yaw);
        let moved = placed.assembly().unwrap();
        let r = yaw.matrix();
        let mut n = 0;
        while n < 100 {
            let p = Vec3::new(rng.gen_range(-6.0..6.0), rng.gen_range(-1.0..3.0), rng.gen_range(-3.0..8.0)) * 1e-3;
            if !exterior(&bare, &p) {
                continue;
            }
            let expect = r * bare.field(&p).unwrap();
            let got = moved.field(&placed.to_global(&p)).unwrap();
            assert!((got - expect).norm() <= 1e-12 * expect.norm(), "{yaw:?} at {p:?}");
            n += 1;
        }
    }
}

#[test]
fn empty_scene_has_no_field() {
    let a = compose_scene(&[]).unwrap();
    assert!(a.is_empty());
    assert_eq!(a.field(&Vec3::new(1e-3, 2e-3, 3e-3)).unwrap(), Vec3::zeros());
    let scene = Scene {
        placements: Vec::new(),
        corridors: nine_junction_preset(MIN_MODULE_PITCH, &Preset::NaiveS2.params(), false).unwrap().corridors,
    };
    for r in corridor_report(&scene, DEFAULT_CORRIDOR_PITCH, DEFAULT_FLAG_THRESHOLD).unwrap() {
        assert_eq!((r.max_b, r.flagged), (0.0, 0));
    }
}

#[test]
fn crosstalk_decays_with_pitch() {
    let d = Preset::OptimizedS3_1.params();
    let near = compose_scene(&nine_junction_preset(20e-3, &d, true).unwrap().placements).unwrap();
    let far = compose_scene(&nine_junction_preset(40e-3, &d, true).unwrap().placements).unwrap();
    // the central row and column lie on corridors in both layouts
    for i in -20..=20 {
        let c = i as f64 * 1e-3;
        for p in [Vec3::new(c, d.ion_height, 0.0), Vec3::new(0.0, d.ion_height, c)] {
            let (bn, bf) = (near.field(&p).unwrap().norm(), far.field(&p).unwrap().norm());
            assert!(bf < bn, "at {p:?}: {bf:e} !< {bn:e}");
        }
    }
}

#[test]
fn gate_null_survives_composition() {
    let d = Preset::OptimizedS3_1.params();
    let cfg = AnalysisConfig::default();
    let isolated = find_null(&build_dual_layer(&d).unwrap(), d.ion_height, WINDOW, &cfg).unwrap();
    for pitch in [MIN_MODULE_PITCH, 40e-3] {
        let scene = nine_junction_preset(pitch, &d, true).unwrap();
        let composed = compose_scene(&scene.placements).unwrap();
        for m in &scene.placements {
            let end = m.to_global(&isolated.position);
            let r = composed.field(&end).unwrap().norm();
            assert!(r <= 2.0 * isolated.residual_mag, "{} at pitch {pitch}: {r:e}", m.label);
        }
    }
}

#[test]
fn preset_validation() {
    let d = Preset::NaiveS2.params();
    assert!(matches!(nine_junction_preset(19e-3, &d, false), Err(Error::InvalidParams(_))));
    let s = nine_junction_preset(MIN_MODULE_PITCH, &d, false).unwrap();
    assert_eq!(s.placements.len(), 6);
    assert!(compose_scene(&s.placements).is_ok());
    let reports = corridor_report(&s, DEFAULT_CORRIDOR_PITCH, DEFAULT_FLAG_THRESHOLD).unwrap();
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert!(r.samples >= (2.0 * MIN_MODULE_PITCH / DEFAULT_CORRIDOR_PITCH) as usize);
        assert!(r.gate_clearance > 0.0);
    }
}
