//! Line and grid sampling, null finding, approach offsets and extinction.
//!
//! Every search runs along the symmetry line `(0, y, z)` at a fixed ion
//! height, on the weak-field side z > 0 of the front edge.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::magnetics::{field_jacobian, field_jacobian_richardson, Assembly, FieldSource, Vec3};

/// Resolution and threshold settings shared by the analysis routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    /// Coarse scan pitch for null search, m.
    pub scan_pitch: f64,
    /// Golden-section bracket width at which refinement stops, m.
    pub refine_tol: f64,
    /// |B| below which a minimum counts as an effective null, T.
    pub null_threshold: f64,
    /// Central-difference step, m.
    pub fd_step: f64,
    /// Sampling pitch along approach segments, m.
    pub approach_pitch: f64,
    /// Far end of the extinction scan, m.
    pub extinction_window: f64,
    /// Sampling pitch of the extinction scan, m.
    pub extinction_pitch: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            scan_pitch: 10e-6,
            refine_tol: 0.1e-6,
            null_threshold: 1e-4,
            fd_step: 1e-6,
            approach_pitch: 10e-6,
            extinction_window: 100e-3,
            extinction_pitch: 10e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec {
    pub start: Vec3,
    pub end: Vec3,
    pub n_samples: usize,
}

impl LineSpec {
    pub fn new(start: Vec3, end: Vec3, n_samples: usize) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::InvalidParams("a line needs at least 2 samples".into()));
        }
        if start == end {
            return Err(Error::InvalidParams("line start and end coincide".into()));
        }
        Ok(Self { start, end, n_samples })
    }

    /// Equally spaced points, endpoints included exactly.
    pub fn points(&self) -> Vec<Vec3> {
        let last = self.n_samples - 1;
        (0..self.n_samples)
            .map(|i| if i == last { self.end } else { self.start + (self.end - self.start) * (i as f64 / last as f64) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The two remaining axes in x, y, z order.
    pub fn in_plane(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Rectangular grid on an axis-aligned plane. The in-plane axes are taken
/// in x, y, z order; samples are row-major with the first in-plane axis as
/// the slow (row) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub normal: Axis,
    pub offset: f64,
    pub first: (f64, f64),
    pub n_first: usize,
    pub second: (f64, f64),
    pub n_second: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<Vec3>> {
        if self.n_first < 2 || self.n_second < 2 {
            return Err(Error::InvalidParams("grid counts must be at least 2".into()));
        }
        let (a, b) = self.normal.in_plane();
        let lerp = |(lo, hi): (f64, f64), i: usize, n: usize| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / (n - 1) as f64)
            }
        };
        let mut pts = Vec::with_capacity(self.n_first * self.n_second);
        for i in 0..self.n_first {
            for j in 0..self.n_second {
                let mut p = Vec3::zeros();
                p[self.normal.index()] = self.offset;
                p[a.index()] = lerp(self.first, i, self.n_first);
                p[b.index()] = lerp(self.second, j, self.n_second);
                pts.push(p);
            }
        }
        Ok(pts)
    }
}

/// Sampled field values, with optional axial gradient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldProfile {
    pub positions: Vec<Vec3>,
    pub b: Vec<Vec3>,
    pub dbz_dz: Option<Vec<f64>>,
}

impl FieldProfile {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Largest |B| and its position.
    pub fn peak(&self) -> Option<(f64, Vec3)> {
        self.b.iter().zip(&self.positions).map(|(b, p)| (b.norm(), *p)).fold(None, |best, cur| match best {
            Some((m, _)) if m >= cur.0 => best,
            _ => Some(cur),
        })
    }
}

/// Characterization of a field minimum on the ion line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullReport {
    pub position: Vec3,
    pub residual_b: Vec3,
    pub residual_mag: f64,
    /// ∂B_z/∂z at the minimum, T/m.
    pub axial_gradient: f64,
    /// Distance past the front edge (z = 0), m.
    pub distance_from_edge: f64,
    pub is_effective_null: bool,
}

fn locate(err: Error, index: usize) -> Error {
    match err {
        Error::PointInsideOrOnMagnet { magnet, .. } => Error::SampleInsideMagnet { index, magnet },
        other => other,
    }
}

/// Field at every point, in order, evaluated in parallel.
pub fn sample_points<S: FieldSource + ?Sized>(src: &S, points: &[Vec3]) -> Result<Vec<Vec3>> {
    points.par_iter().enumerate().map(|(i, p)| src.field(p).map_err(|e| locate(e, i))).collect()
}

fn axial_gradients<S: FieldSource + ?Sized>(src: &S, points: &[Vec3], h: f64) -> Result<Vec<f64>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| field_jacobian(src, p, h).map(|j| j[(2, 2)]).map_err(|e| locate(e, i)))
        .collect()
}

pub fn sample_line<S: FieldSource + ?Sized>(
    src: &S,
    spec: &LineSpec,
    with_gradient: bool,
    fd_step: f64,
) -> Result<FieldProfile> {
    let positions = spec.points();
    let b = sample_points(src, &positions)?;
    let dbz_dz = if with_gradient { Some(axial_gradients(src, &positions, fd_step)?) } else { None };
    Ok(FieldProfile { positions, b, dbz_dz })
}

pub fn sample_grid<S: FieldSource + ?Sized>(src: &S, spec: &GridSpec) -> Result<FieldProfile> {
    let positions = spec.points()?;
    let b = sample_points(src, &positions)?;
    Ok(FieldProfile { positions, b, dbz_dz: None })
}

fn ion_point(y: f64, z: f64) -> Vec3 {
    Vec3::new(0.0, y, z)
}

/// Finds the lowest interior minimum of |B| along `(0, y, z)` for z in the
/// window, refining it by golden-section search.
pub fn find_null<S: FieldSource + ?Sized>(
    src: &S,
    y: f64,
    z_window: (f64, f64),
    cfg: &AnalysisConfig,
) -> Result<NullReport> {
    let (lo, hi) = z_window;
    if !(lo < hi) || lo < 0.0 {
        return Err(Error::InvalidParams(format!("null window must satisfy 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    if !(cfg.null_threshold > 0.0 && cfg.scan_pitch > 0.0 && cfg.refine_tol > 0.0) {
        return Err(Error::InvalidParams("thresholds and pitches must be positive".into()));
    }
    let n = ((hi - lo) / cfg.scan_pitch).ceil() as usize + 1;
    let zs: Vec<f64> = (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * cfg.scan_pitch }).collect();
    let pts: Vec<Vec3> = zs.iter().map(|&z| ion_point(y, z)).collect();
    let mags: Vec<f64> = sample_points(src, &pts)?.iter().map(|b| b.norm()).collect();

    let best = (1..n.saturating_sub(1))
        .filter(|&i| mags[i] <= mags[i - 1] && mags[i] <= mags[i + 1])
        .filter(|&i| mags[i] < mags[i - 1] || mags[i] < mags[i + 1])
        .min_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(a.cmp(&b)))
        .ok_or(Error::NoNullFound { lo, hi })?;

    let magnitude = |z: f64| src.field(&ion_point(y, z)).map(|b| b.norm());
    let z = golden_section(magnitude, zs[best - 1], zs[best + 1], cfg.refine_tol)?;
    let position = ion_point(y, z);
    let residual_b = src.field(&position)?;
    let residual_mag = residual_b.norm();
    let axial_gradient = field_jacobian(src, &position, cfg.fd_step)?[(2, 2)];
    Ok(NullReport {
        position,
        residual_b,
        residual_mag,
        axial_gradient,
        distance_from_edge: position.z,
        is_effective_null: residual_mag < cfg.null_threshold,
    })
}

/// Minimizes a unimodal `f` on `[a, b]` until the bracket is below `tol`.
fn golden_section<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}

/// ∂B_z/∂z at the reported null from a Richardson-extrapolated stencil.
pub fn axial_gradient_at_null<S: FieldSource + ?Sized>(src: &S, report: &NullReport, fd_step: f64) -> Result<f64> {
    let (jac, _) = field_jacobian_richardson(src, &report.position, fd_step)?;
    Ok(jac[(2, 2)])
}

/// Per-axis maxima of |B| along the approach from `from_z` into the null.
pub fn approach_offsets<S: FieldSource + ?Sized>(
    src: &S,
    y: f64,
    from_z: f64,
    null: &NullReport,
    pitch: f64,
) -> Result<Vec3> {
    approach_offsets_between(src, y, from_z, null.position.z, pitch)
}

/// Per-axis maxima of |B| on `(0, y, z)` for z from `from_z` down to `to_z`.
pub fn approach_offsets_between<S: FieldSource + ?Sized>(
    src: &S,
    y: f64,
    from_z: f64,
    to_z: f64,
    pitch: f64,
) -> Result<Vec3> {
    if !(from_z > to_z) {
        return Err(Error::InvalidParams(format!("approach must start beyond its end (from_z {from_z} <= {to_z})")));
    }
    if !(pitch > 0.0) {
        return Err(Error::InvalidParams("pitch must be positive".into()));
    }
    let n = ((from_z - to_z) / pitch).ceil() as usize + 1;
    let line = LineSpec::new(ion_point(y, from_z), ion_point(y, to_z), n)?;
    let b = sample_points(src, &line.points())?;
    Ok(b.iter().fold(Vec3::zeros(), |acc, v| acc.sup(&v.abs())))
}

/// Largest z in `(0, window]` on `(0, y, z)` where |B| is at least
/// `threshold`, with the crossing refined by bisection.
pub fn extinction_distance<S: FieldSource + ?Sized>(
    src: &S,
    y: f64,
    threshold: f64,
    cfg: &AnalysisConfig,
) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParams("threshold must be positive".into()));
    }
    let pitch = cfg.extinction_pitch;
    let n = (cfg.extinction_window / pitch).ceil() as usize;
    let zs: Vec<f64> = (1..=n).map(|i| (i as f64 * pitch).min(cfg.extinction_window)).collect();
    let pts: Vec<Vec3> = zs.iter().map(|&z| ion_point(y, z)).collect();
    let mags: Vec<f64> = sample_points(src, &pts)?.iter().map(|b| b.norm()).collect();
    let last = mags.iter().rposition(|&m| m >= threshold).ok_or(Error::AlwaysBelowThreshold)?;
    if last == n - 1 {
        return Ok(zs[last]);
    }
    let (mut a, mut b) = (zs[last], zs[last + 1]);
    while b - a > cfg.refine_tol {
        let mid = (a + b) / 2.0;
        if src.field(&ion_point(y, mid))?.norm() >= threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a)
}

/// Upper bound on |∂B_z/∂z| at `p` over every magnetization assignment of the
/// assembly's shapes with |B_r| ≤ `br_max`. The field is linear in each
/// magnet's remanence, so the bound is Σ_k ‖∇_J (∂B_z/∂z)_k‖ · br_max.
pub fn axial_gradient_bound(assembly: &Assembly, p: &Vec3, br_max: f64, fd_step: f64) -> Result<f64> {
    let terms: Vec<f64> = assembly
        .magnets()
        .par_iter()
        .map(|m| {
            let mut g = Vec3::zeros();
            for axis in 0..3 {
                let mut unit = Vec3::zeros();
                unit[axis] = 1.0;
                let (jac, _) = field_jacobian_richardson(&m.with_remanence(unit), p, fd_step)?;
                g[axis] = jac[(2, 2)];
            }
            Ok(g.norm())
        })
        .collect::<Result<_>>()?;
    Ok(br_max * terms.iter().sum::<f64>())
}
