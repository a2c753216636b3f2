//! Shuttled-ion exposure: Lorentz force estimates, force profiles along a
//! path, and first-order phase accumulation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::magnetics::{FieldSource, Vec3};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Default arc-length sampling pitch along paths, m.
pub const DEFAULT_PATH_PITCH: f64 = 10e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies {
    /// C
    pub charge: f64,
    /// kg
    pub mass: f64,
    pub label: String,
}

impl IonSpecies {
    pub fn new(charge: f64, mass: f64, label: impl Into<String>) -> Result<Self> {
        if charge == 0.0 || !charge.is_finite() {
            return Err(Error::InvalidParams("ion charge must be non-zero".into()));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParams("ion mass must be positive".into()));
        }
        Ok(Self { charge, mass, label: label.into() })
    }

    /// Singly charged ¹⁷¹Yb⁺.
    pub fn yb171() -> Self {
        Self { charge: ELEMENTARY_CHARGE, mass: 171.0 * ATOMIC_MASS_UNIT, label: "171Yb+".into() }
    }
}

/// Typical trap confinement forces used for comparison, N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confinement {
    pub radial: f64,
    pub axial: f64,
}

impl Default for Confinement {
    fn default() -> Self {
        Self { radial: 1e-16, axial: 1e-19 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzEstimate {
    /// N
    pub force: f64,
    /// m/s²
    pub acceleration: f64,
    pub ratio_to_radial: f64,
    pub ratio_to_axial: f64,
}

/// Worst-case (v ⊥ B) force `|q| v B` and the resulting acceleration.
pub fn lorentz_estimate(ion: &IonSpecies, speed: f64, b: f64, confinement: &Confinement) -> LorentzEstimate {
    let force = ion.charge.abs() * speed.abs() * b.abs();
    LorentzEstimate {
        force,
        acceleration: force / ion.mass,
        ratio_to_radial: force / confinement.radial,
        ratio_to_axial: force / confinement.axial,
    }
}

/// Polyline traversed at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuttlePath {
    waypoints: Vec<Vec3>,
    speed: f64,
}

impl ShuttlePath {
    pub fn new(waypoints: Vec<Vec3>, speed: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidParams("a path needs at least 2 waypoints".into()));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidParams("shuttling speed must be positive".into()));
        }
        if waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("consecutive waypoints coincide".into()));
        }
        Ok(Self { waypoints, speed })
    }

    pub fn waypoints(&self) -> &[Vec3] {
        &self.waypoints
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn duration(&self) -> f64 {
        self.length() / self.speed
    }

    /// Copy traversed back to front.
    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Self { waypoints, speed: self.speed }
    }

    /// Sample points at no more than `pitch` spacing. Each segment's points
    /// are symmetric in its endpoints, so a segment traversed backwards
    /// visits bit-identical positions.
    pub fn samples(&self, pitch: f64) -> Vec<PathSample> {
        let mut out = Vec::new();
        let mut s0 = 0.0;
        let last_seg = self.waypoints.len() - 2;
        for (k, w) in self.waypoints.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let len = (b - a).norm();
            let n = segment_divisions(len, pitch);
            let dir = (b - a) / len;
            let end = if k == last_seg { n } else { n - 1 };
            for i in 0..=end {
                out.push(PathSample {
                    s: s0 + len * (i as f64 / n as f64),
                    position: segment_point(&a, &b, i, n),
                    direction: dir,
                });
            }
            s0 += len;
        }
        out
    }
}

fn segment_divisions(len: f64, pitch: f64) -> usize {
    ((len / pitch).ceil() as usize).max(1)
}

fn segment_point(a: &Vec3, b: &Vec3, i: usize, n: usize) -> Vec3 {
    a * ((n - i) as f64 / n as f64) + b * (i as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// Arc length from the first waypoint, m.
    pub s: f64,
    pub position: Vec3,
    /// Unit direction of travel.
    pub direction: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureSample {
    pub s: f64,
    /// s
    pub t: f64,
    pub position: Vec3,
    pub b: Vec3,
    /// q v × B, N
    pub force: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureProfile {
    pub samples: Vec<ExposureSample>,
    pub peak_force: f64,
    pub peak_location: Vec3,
    pub max_b: f64,
}

/// Field and Lorentz force at every path sample.
pub fn path_exposure<S: FieldSource + ?Sized>(
    src: &S,
    ion: &IonSpecies,
    path: &ShuttlePath,
    pitch: f64,
) -> Result<ExposureProfile> {
    if !(pitch > 0.0) {
        return Err(Error::InvalidParams("pitch must be positive".into()));
    }
    let samples = path.samples(pitch);
    let exposure: Vec<ExposureSample> = samples
        .par_iter()
        .map(|ps| {
            let b = src.field(&ps.position)?;
            let v = ps.direction * path.speed;
            Ok(ExposureSample {
                s: ps.s,
                t: ps.s / path.speed,
                position: ps.position,
                b,
                force: ion.charge * v.cross(&b),
            })
        })
        .collect::<Result<_>>()?;
    let (peak_force, peak_location) = exposure.iter().fold((0.0, exposure[0].position), |(best, at), e| {
        let f = e.force.norm();
        if f > best {
            (f, e.position)
        } else {
            (best, at)
        }
    });
    let max_b = exposure.iter().map(|e| e.b.norm()).fold(0.0, f64::max);
    Ok(ExposureProfile { samples: exposure, peak_force, peak_location, max_b })
}

/// `∫ sensitivity · |B(r(t))| dt` by the trapezoid rule at `pitch` spacing.
///
/// Each segment's sum runs in a fixed geometric order, so reversing a path
/// reproduces its phase bit for bit.
pub fn phase_accumulation<S: FieldSource + ?Sized>(
    src: &S,
    path: &ShuttlePath,
    sensitivity: f64,
    pitch: f64,
) -> Result<f64> {
    if !(sensitivity >= 0.0) {
        return Err(Error::InvalidParams("sensitivity must be non-negative".into()));
    }
    if !(pitch > 0.0) {
        return Err(Error::InvalidParams("pitch must be positive".into()));
    }
    let mut phase = 0.0;
    for w in path.waypoints.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if (b.x, b.y, b.z) < (a.x, a.y, a.z) {
            std::mem::swap(&mut a, &mut b);
        }
        let len = (b - a).norm();
        let n = segment_divisions(len, pitch);
        let pts: Vec<Vec3> = (0..=n).map(|i| segment_point(&a, &b, i, n)).collect();
        let mags: Vec<f64> = pts.par_iter().map(|p| src.field(p).map(|v| v.norm())).collect::<Result<_>>()?;
        let dt = len / n as f64 / path.speed;
        let sum: f64 = mags.windows(2).map(|m| (m[0] + m[1]) * 0.5 * dt).sum();
        phase += sensitivity * sum;
    }
    Ok(phase)
}
