//! Multi-module tilings: placing dual-layer arrays around trap junctions and
//! checking field exposure along shuttling corridors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{sample_points, FieldProfile};
use crate::array::{build_dual_layer, DesignParams};
use crate::error::{Error, Result};
use crate::ion::ShuttlePath;
use crate::magnetics::{Assembly, Mat3, Vec3};

/// Smallest module pitch accepted by [`nine_junction_preset`], m.
pub const MIN_MODULE_PITCH: f64 = 20e-3;
/// Default corridor sampling pitch, m.
pub const DEFAULT_CORRIDOR_PITCH: f64 = 50e-6;
/// Default exposure flag threshold, T (1 G).
pub const DEFAULT_FLAG_THRESHOLD: f64 = 1e-4;
/// Corridor traversal speed used by the preset, m/s.
pub const DEFAULT_CORRIDOR_SPEED: f64 = 1.6;

/// Rotation about the vertical axis in quarter turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Yaw {
    #[default]
    #[serde(rename = "0")]
    Deg0,
    #[serde(rename = "90")]
    Deg90,
    #[serde(rename = "180")]
    Deg180,
    #[serde(rename = "270")]
    Deg270,
}

impl Yaw {
    pub fn from_degrees(deg: i64) -> Result<Self> {
        match deg.rem_euclid(360) {
            0 => Ok(Yaw::Deg0),
            90 => Ok(Yaw::Deg90),
            180 => Ok(Yaw::Deg180),
            270 => Ok(Yaw::Deg270),
            _ => Err(Error::InvalidParams(format!("yaw must be a multiple of 90 degrees, got {deg}"))),
        }
    }

    pub fn degrees(self) -> i64 {
        match self {
            Yaw::Deg0 => 0,
            Yaw::Deg90 => 90,
            Yaw::Deg180 => 180,
            Yaw::Deg270 => 270,
        }
    }

    /// Exact rotation about +y: +z turns toward +x for 90°.
    pub fn matrix(self) -> Mat3 {
        let (c, s) = match self {
            Yaw::Deg0 => (1.0, 0.0),
            Yaw::Deg90 => (0.0, 1.0),
            Yaw::Deg180 => (-1.0, 0.0),
            Yaw::Deg270 => (0.0, -1.0),
        };
        Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulePlacement {
    pub label: String,
    pub design: DesignParams,
    /// Global position of the module's front-edge origin, m.
    pub translation: Vec3,
    pub yaw: Yaw,
    /// Rendered as an optional site in layouts.
    pub optional: bool,
}

impl ModulePlacement {
    pub fn new(label: impl Into<String>, design: DesignParams, translation: Vec3, yaw: Yaw) -> Self {
        Self { label: label.into(), design, translation, yaw, optional: false }
    }

    /// Module-frame point mapped into the global frame.
    pub fn to_global(&self, p: &Vec3) -> Vec3 {
        self.yaw.matrix() * p + self.translation
    }

    /// Global position of the module's gate zone: the front edge at ion height.
    pub fn gate_point(&self) -> Vec3 {
        self.to_global(&Vec3::new(0.0, self.design.ion_height, 0.0))
    }

    pub fn assembly(&self) -> Result<Assembly> {
        let local = build_dual_layer(&self.design)?;
        let r = self.yaw.matrix();
        let magnets = local.magnets().iter().map(|m| m.transformed(&r, &self.translation)).collect();
        Assembly::new(self.label.clone(), magnets)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub placements: Vec<ModulePlacement>,
    pub corridors: Vec<ShuttlePath>,
}

/// Flattens every placement into one assembly in the global frame, in
/// placement order.
pub fn compose_scene(placements: &[ModulePlacement]) -> Result<Assembly> {
    let mut magnets = Vec::new();
    for p in placements {
        magnets.extend(p.assembly()?.magnets().iter().cloned());
    }
    Assembly::new("scene", magnets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorridorReport {
    pub max_b: f64,
    pub max_location: Vec3,
    /// Samples with |B| at or above the flag threshold.
    pub flagged: usize,
    pub samples: usize,
    /// Closest approach of the corridor to any module's gate point, m.
    pub gate_clearance: f64,
}

/// Samples every corridor at no more than `pitch` and flags points where |B|
/// reaches `threshold`.
pub fn corridor_report(scene: &Scene, pitch: f64, threshold: f64) -> Result<Vec<CorridorReport>> {
    if !(pitch > 0.0 && threshold > 0.0) {
        return Err(Error::InvalidParams("pitch and threshold must be positive".into()));
    }
    let assembly = compose_scene(&scene.placements)?;
    let gates: Vec<Vec3> = scene.placements.iter().map(|p| p.gate_point()).collect();
    scene
        .corridors
        .par_iter()
        .map(|path| {
            let pts: Vec<Vec3> = path.samples(pitch).iter().map(|s| s.position).collect();
            let b = sample_points(&assembly, &pts)?;
            let (mut max_b, mut max_location) = (0.0, pts[0]);
            for (p, v) in pts.iter().zip(&b) {
                if v.norm() > max_b {
                    max_b = v.norm();
                    max_location = *p;
                }
            }
            let gate_clearance =
                pts.iter().flat_map(|p| gates.iter().map(move |g| (p - g).norm())).fold(f64::INFINITY, f64::min);
            Ok(CorridorReport {
                max_b,
                max_location,
                flagged: b.iter().filter(|v| v.norm() >= threshold).count(),
                samples: pts.len(),
                gate_clearance,
            })
        })
        .collect()
}

/// Field samples along corridor `index` of `scene`.
pub fn sample_corridor(scene: &Scene, index: usize, pitch: f64) -> Result<FieldProfile> {
    let path = scene.corridors.get(index).ok_or_else(|| Error::InvalidParams(format!("no corridor {index}")))?;
    if !(pitch > 0.0) {
        return Err(Error::InvalidParams("pitch must be positive".into()));
    }
    let assembly = compose_scene(&scene.placements)?;
    let positions: Vec<Vec3> = path.samples(pitch).iter().map(|s| s.position).collect();
    let b = sample_points(&assembly, &positions)?;
    Ok(FieldProfile { positions, b, dbz_dz: None })
}

/// 3×3 grid of X-junctions at `pitch` in the x–z plane, centered on the
/// origin. Gate arrays sit on the outward arms of the top (+z) and bottom
/// (−z) rows, facing their junction from half a pitch away; with
/// `central_arms`, two more face the middle row from its left and right.
/// Corridors run along every row and column at ion height.
pub fn nine_junction_preset(pitch: f64, design: &DesignParams, central_arms: bool) -> Result<Scene> {
    if !(pitch >= MIN_MODULE_PITCH) || !pitch.is_finite() {
        return Err(Error::InvalidParams(format!("module pitch {pitch} m is below the {MIN_MODULE_PITCH} m minimum")));
    }
    design.validate()?;
    let arm = pitch / 2.0;
    let mut placements = Vec::new();
    for (j, col) in [-1.0, 0.0, 1.0].into_iter().enumerate() {
        let x = col * pitch;
        placements.push(ModulePlacement::new(format!("top_{j}"), *design, Vec3::new(x, 0.0, pitch + arm), Yaw::Deg180));
        placements.push(ModulePlacement::new(
            format!("bottom_{j}"),
            *design,
            Vec3::new(x, 0.0, -pitch - arm),
            Yaw::Deg0,
        ));
    }
    if central_arms {
        for (label, x, yaw) in [("left", -pitch - arm, Yaw::Deg90), ("right", pitch + arm, Yaw::Deg270)] {
            let mut p = ModulePlacement::new(format!("central_{label}"), *design, Vec3::new(x, 0.0, 0.0), yaw);
            p.optional = true;
            placements.push(p);
        }
    }
    let y = design.ion_height;
    let mut corridors = Vec::new();
    for k in [-1.0, 0.0, 1.0] {
        let c = k * pitch;
        corridors
            .push(ShuttlePath::new(vec![Vec3::new(-pitch, y, c), Vec3::new(pitch, y, c)], DEFAULT_CORRIDOR_SPEED)?);
        corridors
            .push(ShuttlePath::new(vec![Vec3::new(c, y, -pitch), Vec3::new(c, y, pitch)], DEFAULT_CORRIDOR_SPEED)?);
    }
    Ok(Scene { placements, corridors })
}
