//! Adaptive numerical quadrature of the surface-charge integral. Shares no
//! code with the closed-form path beyond geometry access.

use std::f64::consts::PI;

use super::{Magnet, Vec3};
use crate::error::{Error, Result};

const MAX_RULE_EVALUATIONS: usize = 5_000_000;

struct Triangle {
    a: Vec3,
    b: Vec3,
    c: Vec3,
    charge: f64,
}

impl Triangle {
    fn area(&self) -> f64 {
        (self.b - self.a).cross(&(self.c - self.a)).norm() / 2.0
    }

    fn split(&self) -> [Triangle; 4] {
        let (ab, bc, ca) = ((self.a + self.b) / 2.0, (self.b + self.c) / 2.0, (self.c + self.a) / 2.0);
        let q = self.charge;
        [
            Triangle { a: self.a, b: ab, c: ca, charge: q },
            Triangle { a: ab, b: self.b, c: bc, charge: q },
            Triangle { a: ca, b: bc, c: self.c, charge: q },
            Triangle { a: ab, b: bc, c: ca, charge: q },
        ]
    }

    /// Radon's 7-point degree-5 rule applied to `charge · (p − r)/|p − r|³`.
    fn rule(&self, p: &Vec3) -> Vec3 {
        let s15 = 15f64.sqrt();
        let (a1, b1) = ((6.0 - s15) / 21.0, (9.0 + 2.0 * s15) / 21.0);
        let (a2, b2) = ((6.0 + s15) / 21.0, (9.0 - 2.0 * s15) / 21.0);
        let (w1, w2) = ((155.0 - s15) / 1200.0, (155.0 + s15) / 1200.0);
        let at = |u: f64, v: f64, w: f64| {
            let r = self.a * u + self.b * v + self.c * w;
            let d = p - r;
            d / d.norm().powi(3)
        };
        let mut sum = at(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0) * (9.0 / 40.0);
        sum += (at(a1, a1, b1) + at(a1, b1, a1) + at(b1, a1, a1)) * w1;
        sum += (at(a2, a2, b2) + at(a2, b2, a2) + at(b2, a2, a2)) * w2;
        sum * (self.area() * self.charge)
    }
}

/// Field of `m` at `p` from adaptive triangle subdivision of each facet,
/// refined until the estimated error is below `tol` relative to |B|.
pub fn oracle_field_quadrature(m: &Magnet, p: &Vec3, tol: f64) -> Result<Vec3> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    if !m.ensure_exterior(p) {
        return Err(Error::PointInsideOrOnMagnet { magnet: 0, point: *p });
    }
    let j = m.remanence();
    if j == Vec3::zeros() {
        return Ok(Vec3::zeros());
    }

    let shape = m.shape();
    let mut roots = Vec::new();
    for (fi, n) in shape.normals().iter().enumerate() {
        let charge = j.dot(n);
        if charge == 0.0 {
            continue;
        }
        let v: Vec<Vec3> = shape.facet_vertices(fi).collect();
        for i in 1..v.len() - 1 {
            roots.push(Triangle { a: v[0], b: v[i], c: v[i + 1], charge });
        }
    }
    let total_area: f64 = roots.iter().map(Triangle::area).sum();

    let mut budget = MAX_RULE_EVALUATIONS;
    // Start from a crude absolute target, then tighten until the target
    // is consistent with the converged magnitude.
    let mut estimate: Vec3 = roots.iter().map(|t| t.rule(p)).sum();
    let mut abs_tol = tol * estimate.norm().max(f64::MIN_POSITIVE);
    loop {
        let result = integrate(&roots, p, abs_tol, total_area, &mut budget)?;
        let wanted = tol * result.norm();
        if abs_tol <= wanted || result.norm() == 0.0 {
            return Ok(result / (4.0 * PI));
        }
        estimate = result;
        abs_tol = tol * estimate.norm() * 0.5;
    }
}

fn integrate(roots: &[Triangle], p: &Vec3, abs_tol: f64, total_area: f64, budget: &mut usize) -> Result<Vec3> {
    let mut sum = Vec3::zeros();
    let mut stack: Vec<(Triangle, Vec3)> = roots
        .iter()
        .map(|t| {
            let t = Triangle { a: t.a, b: t.b, c: t.c, charge: t.charge };
            let v = t.rule(p);
            (t, v)
        })
        .collect();
    while let Some((tri, coarse)) = stack.pop() {
        if *budget < 4 {
            return Err(Error::QuadratureNonConvergence { evaluations: MAX_RULE_EVALUATIONS - *budget });
        }
        *budget -= 4;
        let children = tri.split();
        let values: Vec<Vec3> = children.iter().map(|c| c.rule(p)).collect();
        let fine: Vec3 = values.iter().sum();
        let local_tol = abs_tol * tri.area() / total_area;
        if (fine - coarse).norm() <= local_tol {
            sum += fine;
        } else {
            stack.extend(children.into_iter().zip(values));
        }
    }
    Ok(sum)
}
