//! Convex polyhedra with outward-oriented planar facets.

use std::collections::HashMap;

use super::Vec3;
use crate::error::{Error, Result};

const PLANARITY_TOL: f64 = 1e-12;

/// A convex, watertight polyhedron. Facets are vertex-index loops ordered
/// counter-clockwise when seen from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    vertices: Vec<Vec3>,
    facets: Vec<Vec<usize>>,
    normals: Vec<Vec3>,
}

impl Polyhedron {
    /// Validates and builds a polyhedron.
    pub fn new(vertices: Vec<Vec3>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let degenerate = |msg: String| Err(Error::DegenerateGeometry(msg));
        if vertices.len() < 4 || facets.len() < 4 {
            return degenerate("a polyhedron needs at least 4 vertices and 4 facets".into());
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return degenerate("non-finite vertex".into());
        }

        let mut normals = Vec::with_capacity(facets.len());
        for (fi, loop_) in facets.iter().enumerate() {
            if loop_.len() < 3 {
                return degenerate(format!("facet {fi} has fewer than 3 vertices"));
            }
            if loop_.iter().any(|&i| i >= vertices.len()) {
                return degenerate(format!("facet {fi} references a missing vertex"));
            }
            // Newell's method: robust for any planar loop.
            let mut n = Vec3::zeros();
            for (a, b) in cyclic_pairs(loop_) {
                let (p, q) = (vertices[a], vertices[b]);
                n += p.cross(&q);
            }
            let norm = n.norm();
            if norm == 0.0 {
                return degenerate(format!("facet {fi} has zero area"));
            }
            let n = n / norm;
            let origin = vertices[loop_[0]];
            for &i in loop_ {
                if n.dot(&(vertices[i] - origin)).abs() > PLANARITY_TOL {
                    return degenerate(format!("facet {fi} is not planar"));
                }
            }
            normals.push(n);
        }

        // Every directed edge must appear once, and its reverse once.
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for loop_ in &facets {
            for (a, b) in cyclic_pairs(loop_) {
                *edges.entry((a, b)).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &edges {
            if count != 1 || edges.get(&(b, a)) != Some(&1) {
                return degenerate(format!("edge ({a}, {b}) is not shared by exactly two facets"));
            }
        }

        let poly = Self { vertices, facets, normals };
        if poly.volume() <= 0.0 {
            return degenerate("facets are not outward oriented".into());
        }
        // Convexity: every vertex lies on or behind every facet plane.
        let scale = poly.diameter();
        for (fi, loop_) in poly.facets.iter().enumerate() {
            let origin = poly.vertices[loop_[0]];
            let n = poly.normals[fi];
            if poly.vertices.iter().any(|v| n.dot(&(v - origin)) > PLANARITY_TOL.max(1e-12 * scale)) {
                return degenerate(format!("not convex at facet {fi}"));
            }
        }
        Ok(poly)
    }

    /// Axis-aligned box centered at `center` with edge lengths `size`.
    pub fn cuboid(center: Vec3, size: Vec3) -> Result<Self> {
        if size.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidParams(format!("cuboid size must be positive, got {size:?}")));
        }
        let h = size / 2.0;
        let v = |sx: f64, sy: f64, sz: f64| center + Vec3::new(sx * h.x, sy * h.y, sz * h.z);
        let vertices = vec![
            v(-1.0, -1.0, -1.0),
            v(1.0, -1.0, -1.0),
            v(1.0, 1.0, -1.0),
            v(-1.0, 1.0, -1.0),
            v(-1.0, -1.0, 1.0),
            v(1.0, -1.0, 1.0),
            v(1.0, 1.0, 1.0),
            v(-1.0, 1.0, 1.0),
        ];
        let facets = vec![
            vec![0, 3, 2, 1], // -z
            vec![4, 5, 6, 7], // +z
            vec![0, 1, 5, 4], // -y
            vec![3, 7, 6, 2], // +y
            vec![0, 4, 7, 3], // -x
            vec![1, 2, 6, 5], // +x
        ];
        Self::new(vertices, facets)
    }

    /// Prism whose cross-section is a rhombus in the x-z plane, extruded
    /// along y. The rhombus has its corners at `±diagonals.0 / 2` along x
    /// and `±diagonals.1 / 2` along z from `center`.
    pub fn rhombic_prism(diagonals: (f64, f64), height: f64, center: Vec3) -> Result<Self> {
        let (dt, da) = diagonals;
        if !(dt > 0.0 && da > 0.0 && height > 0.0) {
            return Err(Error::InvalidParams(format!(
                "rhombic prism needs positive diagonals and height, got ({dt}, {da}), {height}"
            )));
        }
        let (hx, hz, hy) = (dt / 2.0, da / 2.0, height / 2.0);
        // Cross-section corners, counter-clockwise seen from +y: +x, -z, -x, +z.
        let corners = [(hx, 0.0), (0.0, -hz), (-hx, 0.0), (0.0, hz)];
        let mut vertices = Vec::with_capacity(8);
        for y in [-hy, hy] {
            for &(x, z) in &corners {
                vertices.push(center + Vec3::new(x, y, z));
            }
        }
        let mut facets = vec![vec![0, 3, 2, 1], vec![4, 5, 6, 7]];
        for i in 0..4 {
            let j = (i + 1) % 4;
            facets.push(vec![i, j, j + 4, i + 4]);
        }
        Self::new(vertices, facets)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Outward unit normal of each facet.
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    /// Vertex positions of facet `index`, in loop order.
    pub fn facet_vertices(&self, index: usize) -> impl Iterator<Item = Vec3> + '_ {
        self.facets[index].iter().map(|&i| self.vertices[i])
    }

    pub fn volume(&self) -> f64 {
        let origin = self.vertices[0];
        let mut six_v = 0.0;
        for loop_ in &self.facets {
            let a = self.vertices[loop_[0]] - origin;
            for w in loop_[1..].windows(2) {
                let b = self.vertices[w[0]] - origin;
                let c = self.vertices[w[1]] - origin;
                six_v += a.dot(&b.cross(&c));
            }
        }
        six_v / 6.0
    }

    pub fn centroid_of_vertices(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// (min, max) corners of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Largest signed distance from `p` to any facet plane. Positive outside;
    /// the true distance to the body is at least this value.
    pub fn max_plane_distance(&self, p: &Vec3) -> f64 {
        self.facets
            .iter()
            .zip(&self.normals)
            .map(|(loop_, n)| n.dot(&(p - self.vertices[loop_[0]])))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `x -> rotation * x + translation` to every vertex.
    pub fn transformed(&self, rotation: &nalgebra::Matrix3<f64>, translation: &Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| rotation * v + translation).collect(),
            facets: self.facets.clone(),
            normals: self.normals.iter().map(|n| rotation * n).collect(),
        }
    }

    /// Candidate separating axes: facet normals plus edge-direction cross
    /// products.
    fn edge_directions(&self) -> Vec<Vec3> {
        let mut dirs: Vec<Vec3> = Vec::new();
        for loop_ in &self.facets {
            for (a, b) in cyclic_pairs(loop_) {
                let d = (self.vertices[b] - self.vertices[a]).normalize();
                if !dirs.iter().any(|e| e.cross(&d).norm() < 1e-12) {
                    dirs.push(d);
                }
            }
        }
        dirs
    }

    fn project(&self, axis: &Vec3) -> (f64, f64) {
        self.vertices
            .iter()
            .map(|v| axis.dot(v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }

    /// True when the interiors of `self` and `other` intersect by more than
    /// `clearance` along every separating-axis candidate.
    pub fn interiors_overlap(&self, other: &Polyhedron, clearance: f64) -> bool {
        let mut axes: Vec<Vec3> = self.normals.clone();
        axes.extend_from_slice(&other.normals);
        let (ea, eb) = (self.edge_directions(), other.edge_directions());
        for a in &ea {
            for b in &eb {
                let c = a.cross(b);
                let n = c.norm();
                if n > 1e-9 {
                    axes.push(c / n);
                }
            }
        }
        axes.iter().all(|axis| {
            let (alo, ahi) = self.project(axis);
            let (blo, bhi) = other.project(axis);
            let penetration = ahi.min(bhi) - alo.max(blo);
            penetration > clearance
        })
    }
}

pub(crate) fn cyclic_pairs(loop_: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    loop_.iter().zip(loop_.iter().cycle().skip(1)).map(|(&a, &b)| (a, b))
}
