//! Exterior magnetic field of uniformly magnetized convex polyhedra.
//!
//! A uniformly magnetized body is replaced by surface charge `σ = M·n̂` on
//! its facets. With `J = μ0 M` (the remanence vector, in tesla) the field at
//! an exterior point `p` is
//!
//! ```text
//! B(p) = 1/(4π) Σ_f (J·n̂_f) ∫_f (p − r') / |p − r'|³ dA'
//! ```
//!
//! The facet integral has a closed form: its component along `n̂_f` is the
//! signed solid angle the facet subtends at `p`, and its in-plane part is
//! `Σ_edges ν̂_e ∫_e dl / |p − r'|` with `ν̂_e` the outward in-plane edge
//! normal. Magnets are rigid (μr = 1) and do not perturb each other.

mod polyhedron;
mod quadrature;

use std::f64::consts::PI;

pub use polyhedron::Polyhedron;
pub use quadrature::oracle_field_quadrature;

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * PI;

/// Points closer than this to a magnet surface are rejected, m.
pub const SURFACE_EXCLUSION: f64 = 1e-9;

/// Default central-difference step for Jacobians, m.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Tesla per gauss.
pub const TESLA_PER_GAUSS: f64 = 1e-4;

pub fn gauss_to_tesla(g: f64) -> f64 {
    g * TESLA_PER_GAUSS
}

pub fn tesla_to_gauss(t: f64) -> f64 {
    t / TESLA_PER_GAUSS
}

/// Anything that produces a static magnetic field in free space.
pub trait FieldSource: Sync {
    /// Flux density at `p`, tesla.
    fn field(&self, p: &Vec3) -> Result<Vec3>;
}

/// A uniformly magnetized convex polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct Magnet {
    shape: Polyhedron,
    remanence: Vec3,
}

impl Magnet {
    pub fn new(shape: Polyhedron, remanence: Vec3) -> Result<Self> {
        if !remanence.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParams("remanence must be finite".into()));
        }
        Ok(Self { shape, remanence })
    }

    pub fn shape(&self) -> &Polyhedron {
        &self.shape
    }

    /// Remanence vector: magnitude is B_r in tesla, direction the
    /// magnetization axis.
    pub fn remanence(&self) -> Vec3 {
        self.remanence
    }

    pub fn with_remanence(&self, remanence: Vec3) -> Self {
        Self { shape: self.shape.clone(), remanence }
    }

    /// Magnetic dipole moment `B_r V / μ0`, A·m².
    pub fn moment(&self) -> Vec3 {
        self.remanence * self.shape.volume() / MU0
    }

    /// Rigid transform of both geometry and magnetization.
    pub fn transformed(&self, rotation: &Mat3, translation: &Vec3) -> Self {
        Self { shape: self.shape.transformed(rotation, translation), remanence: rotation * self.remanence }
    }

    fn ensure_exterior(&self, p: &Vec3) -> bool {
        self.shape.max_plane_distance(p) > SURFACE_EXCLUSION
    }
}

/// Field of a single magnet at an exterior point.
pub fn field_of_magnet(m: &Magnet, p: &Vec3) -> Result<Vec3> {
    if !m.ensure_exterior(p) {
        return Err(Error::PointInsideOrOnMagnet { magnet: 0, point: *p });
    }
    Ok(field_unchecked(m, p))
}

fn field_unchecked(m: &Magnet, p: &Vec3) -> Vec3 {
    if m.remanence == Vec3::zeros() {
        return Vec3::zeros();
    }
    let shape = &m.shape;
    let mut b = Vec3::zeros();
    for (fi, n) in shape.normals().iter().enumerate() {
        let charge = m.remanence.dot(n);
        if charge == 0.0 {
            continue;
        }
        b += charge * facet_integral(shape, fi, n, p);
    }
    b / (4.0 * PI)
}

/// `∫_facet (p − r') / |p − r'|³ dA'` in closed form.
fn facet_integral(shape: &Polyhedron, facet: usize, n: &Vec3, p: &Vec3) -> Vec3 {
    let verts: Vec<Vec3> = shape.facet_vertices(facet).collect();
    let rel: Vec<Vec3> = verts.iter().map(|v| v - p).collect();
    let dist: Vec<f64> = rel.iter().map(|r| r.norm()).collect();

    // Out-of-plane part: signed solid angle by fan triangulation
    // (Van Oosterom & Strackee). Positive when p is in front of the facet.
    let mut omega = 0.0;
    for i in 1..rel.len() - 1 {
        let (a, b, c) = (&rel[0], &rel[i], &rel[i + 1]);
        let (la, lb, lc) = (dist[0], dist[i], dist[i + 1]);
        let num = a.dot(&b.cross(c));
        let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
        omega -= 2.0 * num.atan2(den);
    }

    // In-plane part: edge line integrals of 1/R.
    let mut in_plane = Vec3::zeros();
    let k = verts.len();
    for i in 0..k {
        let j = (i + 1) % k;
        let edge = verts[j] - verts[i];
        let len = edge.norm();
        let t = edge / len;
        let outward = t.cross(n);
        in_plane += outward * inverse_distance_line_integral(&rel[i], dist[i], &rel[j], dist[j], &t);
    }

    n * omega + in_plane
}

/// `∫ dl / |r|` along the segment from `a` to `b` (both relative to the
/// field point), written to avoid cancellation off either end.
fn inverse_distance_line_integral(a: &Vec3, ra: f64, b: &Vec3, rb: f64, t: &Vec3) -> f64 {
    let (ta, tb) = (a.dot(t), b.dot(t));
    // Squared distance from the field point to the edge line.
    let d2 = (a - t * ta).norm_squared();
    // r + s where s is the coordinate along t; equals d²/(r − s) exactly.
    let plus = |r: f64, s: f64| if s >= 0.0 { r + s } else { d2 / (r - s) };
    let minus = |r: f64, s: f64| if s <= 0.0 { r - s } else { d2 / (r + s) };
    if ta + tb >= 0.0 {
        (plus(rb, tb) / plus(ra, ta)).ln()
    } else {
        (minus(ra, ta) / minus(rb, tb)).ln()
    }
}

/// Point dipole field `μ0/(4π) (3(m·r̂)r̂ − m)/r³`.
pub fn dipole_field(moment: &Vec3, position: &Vec3, p: &Vec3) -> Vec3 {
    let r = p - position;
    let d = r.norm();
    let rhat = r / d;
    MU0 / (4.0 * PI) * (3.0 * moment.dot(&rhat) * rhat - moment) / (d * d * d)
}

/// A point dipole, mainly useful as an analytic reference source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDipole {
    pub position: Vec3,
    /// A·m²
    pub moment: Vec3,
}

impl FieldSource for PointDipole {
    fn field(&self, p: &Vec3) -> Result<Vec3> {
        Ok(dipole_field(&self.moment, &self.position, p))
    }
}

/// Immutable collection of magnets evaluated by superposition in a fixed
/// magnet order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    magnets: Vec<Magnet>,
    label: String,
}

impl Assembly {
    /// Builds an assembly, rejecting magnets whose interiors overlap by more
    /// than the surface exclusion distance.
    pub fn new(label: impl Into<String>, magnets: Vec<Magnet>) -> Result<Self> {
        for i in 0..magnets.len() {
            for j in i + 1..magnets.len() {
                if magnets[i].shape.interiors_overlap(&magnets[j].shape, SURFACE_EXCLUSION) {
                    return Err(Error::OverlappingMagnets { first: i, second: j });
                }
            }
        }
        Ok(Self { magnets, label: label.into() })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self { magnets: Vec::new(), label: label.into() }
    }

    pub fn magnets(&self) -> &[Magnet] {
        &self.magnets
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.magnets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnets.is_empty()
    }

    /// Copy with every remanence multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            magnets: self.magnets.iter().map(|m| m.with_remanence(m.remanence * s)).collect(),
            label: self.label.clone(),
        }
    }

    /// Index of the first magnet that `p` is inside of or too close to.
    pub fn offending_magnet(&self, p: &Vec3) -> Option<usize> {
        self.magnets.iter().position(|m| !m.ensure_exterior(p))
    }

    pub fn total_volume(&self) -> f64 {
        self.magnets.iter().map(|m| m.shape.volume()).sum()
    }

    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        self.magnets.iter().map(|m| m.shape.bounding_box()).reduce(|(lo, hi), (l, h)| (lo.inf(&l), hi.sup(&h)))
    }
}

impl FieldSource for Magnet {
    fn field(&self, p: &Vec3) -> Result<Vec3> {
        field_of_magnet(self, p)
    }
}

impl FieldSource for Assembly {
    fn field(&self, p: &Vec3) -> Result<Vec3> {
        field_of_assembly(self, p)
    }
}

/// Superposed field of all magnets at `p`.
pub fn field_of_assembly(a: &Assembly, p: &Vec3) -> Result<Vec3> {
    if let Some(magnet) = a.offending_magnet(p) {
        return Err(Error::PointInsideOrOnMagnet { magnet, point: *p });
    }
    Ok(a.magnets.iter().fold(Vec3::zeros(), |acc, m| acc + field_unchecked(m, p)))
}

/// Central-difference Jacobian `J[(i, j)] = ∂B_i/∂x_j`, T/m.
pub fn field_jacobian<S: FieldSource + ?Sized>(src: &S, p: &Vec3, h: f64) -> Result<Mat3> {
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let mut jac = Mat3::zeros();
    for j in 0..3 {
        let mut dp = Vec3::zeros();
        dp[j] = h;
        let col = (src.field(&(p + dp))? - src.field(&(p - dp))?) / (2.0 * h);
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Jacobian with one Richardson step (`(4 D(h/2) − D(h)) / 3`), together
/// with the max-norm of the correction as a truncation-error estimate.
pub fn field_jacobian_richardson<S: FieldSource + ?Sized>(src: &S, p: &Vec3, h: f64) -> Result<(Mat3, f64)> {
    let coarse = field_jacobian(src, p, h)?;
    let fine = field_jacobian(src, p, h / 2.0)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok((extrapolated, (extrapolated - fine).amax()))
}
