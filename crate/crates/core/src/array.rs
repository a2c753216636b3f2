//! Parametric construction of the dual-layer Halbach designs.
//!
//! Placement is canonical: the lower array's top faces lie on the
//! base-plane y = 0, both arrays are centered on x = 0, and the weak-field
//! front edge of both arrays is the plane z = 0. Magnets extend towards
//! negative z; the ion corridor is z > 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnetics::{Assembly, Magnet, Polyhedron, Vec3};
use crate::units::deserialize_length;

/// Offset between the canonical frame's z and the axial coordinate of the
/// published figures, whose front magnet edge sits at 16 mm.
pub const FIGURE_EDGE_Z: f64 = 16e-3;

/// Converts a canonical z to the figures' axial coordinate.
pub fn to_figure_z(z: f64) -> f64 {
    z + FIGURE_EDGE_Z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStyle {
    Cuboid,
    Rhombic,
}

/// Plane in which successive lower-array magnetizations rotate away from +y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationPlane {
    /// `d_k = (0, cos θ_k, sin θ_k)`
    Yz,
    /// `d_k = (sin θ_k, cos θ_k, 0)`
    Xy,
}

impl RotationPlane {
    pub fn direction(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        match self {
            RotationPlane::Yz => Vec3::new(0.0, c, s),
            RotationPlane::Xy => Vec3::new(s, c, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RotationPlane::Yz => "yz",
            RotationPlane::Xy => "xy",
        }
    }
}

/// Edge lengths of a cuboid segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuboidSize {
    #[serde(deserialize_with = "deserialize_length")]
    pub width_x: f64,
    #[serde(deserialize_with = "deserialize_length")]
    pub depth_z: f64,
    #[serde(deserialize_with = "deserialize_length")]
    pub height_y: f64,
}

impl CuboidSize {
    pub fn as_vec(&self) -> Vec3 {
        Vec3::new(self.width_x, self.height_y, self.depth_z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhombusDiagonals {
    #[serde(deserialize_with = "deserialize_length")]
    pub d_transverse: f64,
    #[serde(deserialize_with = "deserialize_length")]
    pub d_axial: f64,
}

/// Parametric description of the dual-layer family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignParams {
    pub n_segments: usize,
    pub cuboid_size: CuboidSize,
    pub center_style: CenterStyle,
    pub rhombus_diagonals: RhombusDiagonals,
    #[serde(deserialize_with = "deserialize_length")]
    pub rhombus_height: f64,
    /// Center-to-center pitch along x, m.
    #[serde(deserialize_with = "deserialize_length")]
    pub spacing: f64,
    /// Radians.
    pub rotation_step: f64,
    pub rotation_plane: RotationPlane,
    /// Tesla.
    pub br_lower: f64,
    /// Tesla.
    pub br_upper: f64,
    /// Base-plane to the bottom face of the upper array, m.
    #[serde(deserialize_with = "deserialize_length")]
    pub separation: f64,
    /// Axial shift of the upper array, m.
    #[serde(deserialize_with = "deserialize_length")]
    pub axial_offset_upper: f64,
    /// Ion height above the base-plane, m.
    #[serde(deserialize_with = "deserialize_length")]
    pub ion_height: f64,
}

impl Default for DesignParams {
    fn default() -> Self {
        Self {
            n_segments: 9,
            cuboid_size: CuboidSize { width_x: 0.5e-3, depth_z: 1.0e-3, height_y: 1.0e-3 },
            center_style: CenterStyle::Rhombic,
            rhombus_diagonals: RhombusDiagonals { d_transverse: 0.5e-3, d_axial: 1.0e-3 },
            rhombus_height: 1.0e-3,
            spacing: 1.5e-3,
            rotation_step: std::f64::consts::FRAC_PI_4,
            rotation_plane: RotationPlane::Xy,
            br_lower: 1.0,
            br_upper: 0.5,
            separation: 2.25e-3,
            axial_offset_upper: 0.0,
            ion_height: 0.5e-3,
        }
    }
}

impl DesignParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_segments == 0 {
            return bad("n_segments must be at least 1".into());
        }
        if self.center_style == CenterStyle::Rhombic && self.n_segments.is_multiple_of(2) {
            return bad("a rhombic center needs an odd n_segments".into());
        }
        let lengths = [
            ("cuboid_size.width_x", self.cuboid_size.width_x),
            ("cuboid_size.depth_z", self.cuboid_size.depth_z),
            ("cuboid_size.height_y", self.cuboid_size.height_y),
            ("rhombus_diagonals.d_transverse", self.rhombus_diagonals.d_transverse),
            ("rhombus_diagonals.d_axial", self.rhombus_diagonals.d_axial),
            ("rhombus_height", self.rhombus_height),
            ("spacing", self.spacing),
            ("separation", self.separation),
            ("ion_height", self.ion_height),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a positive length, got {v}"));
            }
        }
        for (name, v) in [
            ("rotation_step", self.rotation_step),
            ("br_lower", self.br_lower),
            ("br_upper", self.br_upper),
            ("axial_offset_upper", self.axial_offset_upper),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.br_lower < 0.0 || self.br_upper < 0.0 {
            return bad("remanence magnitudes must be non-negative".into());
        }
        Ok(())
    }

    /// x coordinate of segment `k`'s center.
    pub fn segment_x(&self, k: usize) -> f64 {
        (k as f64 - (self.n_segments as f64 - 1.0) / 2.0) * self.spacing
    }

    /// Magnetization direction of lower magnet `k`.
    pub fn lower_direction(&self, k: usize) -> Vec3 {
        self.rotation_plane.direction(k as f64 * self.rotation_step)
    }

    fn is_center(&self, k: usize) -> bool {
        self.center_style == CenterStyle::Rhombic && k == self.n_segments / 2
    }

    /// Shape of segment `k` with its top face at `top_y` and its front
    /// (largest-z) point at `front_z`.
    fn segment_shape(&self, k: usize, top_y: f64, front_z: f64) -> Result<Polyhedron> {
        let x = self.segment_x(k);
        if self.is_center(k) {
            let d = self.rhombus_diagonals;
            let h = self.rhombus_height;
            Polyhedron::rhombic_prism(
                (d.d_transverse, d.d_axial),
                h,
                Vec3::new(x, top_y - h / 2.0, front_z - d.d_axial / 2.0),
            )
        } else {
            let s = self.cuboid_size;
            Polyhedron::cuboid(Vec3::new(x, top_y - s.height_y / 2.0, front_z - s.depth_z / 2.0), s.as_vec())
        }
    }

    fn segment_height(&self, k: usize) -> f64 {
        if self.is_center(k) {
            self.rhombus_height
        } else {
            self.cuboid_size.height_y
        }
    }

    /// Closed-form total magnet volume of the assembly.
    pub fn total_volume(&self) -> f64 {
        let s = self.cuboid_size;
        let cuboid = s.width_x * s.depth_z * s.height_y;
        let per_layer = match self.center_style {
            CenterStyle::Cuboid => self.n_segments as f64 * cuboid,
            CenterStyle::Rhombic => {
                let d = self.rhombus_diagonals;
                (self.n_segments - 1) as f64 * cuboid + 0.5 * d.d_transverse * d.d_axial * self.rhombus_height
            }
        };
        2.0 * per_layer
    }
}

/// Builds the lower Halbach layer and the upper compensation layer.
///
/// Magnets are ordered lower 0..n along +x, then upper 0..n along +x.
pub fn build_dual_layer(params: &DesignParams) -> Result<Assembly> {
    params.validate()?;
    let n = params.n_segments;
    let mut magnets = Vec::with_capacity(2 * n);
    for k in 0..n {
        let shape = params.segment_shape(k, 0.0, 0.0)?;
        magnets.push(Magnet::new(shape, params.lower_direction(k) * params.br_lower)?);
    }
    for k in 0..n {
        let top = params.separation + params.segment_height(k);
        let shape = params.segment_shape(k, top, params.axial_offset_upper)?;
        magnets.push(Magnet::new(shape, Vec3::new(0.0, -params.br_upper, 0.0))?);
    }
    Assembly::new(label_for(params), magnets)
}

fn label_for(p: &DesignParams) -> String {
    format!(
        "dual-layer n={} center={:?} plane={} sep={:e}",
        p.n_segments,
        p.center_style,
        p.rotation_plane.name(),
        p.separation
    )
}

/// Named designs from the published study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Nine cuboids per layer, 2 mm separation.
    NaiveS2,
    /// Rhombic-prism central magnets, 2 mm separation.
    RhombicS3,
    /// Rhombic center after parameter tuning: 2.25 mm separation.
    OptimizedS3_1,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::NaiveS2, Preset::RhombicS3, Preset::OptimizedS3_1];

    pub fn name(self) -> &'static str {
        match self {
            Preset::NaiveS2 => "naive_s2",
            Preset::RhombicS3 => "rhombic_s3",
            Preset::OptimizedS3_1 => "optimized_s3_1",
        }
    }

    pub fn params(self) -> DesignParams {
        let base = DesignParams::default();
        match self {
            Preset::NaiveS2 => DesignParams { center_style: CenterStyle::Cuboid, separation: 2.0e-3, ..base },
            Preset::RhombicS3 => DesignParams { separation: 2.0e-3, ..base },
            Preset::OptimizedS3_1 => base,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown preset '{s}'")))
    }
}

/// Parameters and assembly of a named design.
pub fn paper_design(which: Preset) -> (DesignParams, Assembly) {
    let params = which.params();
    let assembly = build_dual_layer(&params).expect("preset parameters are valid");
    (params, assembly)
}
