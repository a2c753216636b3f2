//! Coordinate sweeps over design parameters, maximizing the axial gradient
//! at the null subject to null-quality, compensability and clearance limits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{approach_offsets_between, axial_gradient_at_null, find_null, AnalysisConfig, NullReport};
use crate::array::{build_dual_layer, DesignParams};
use crate::error::{Error, Result};
use crate::magnetics::Vec3;

/// Relative round-over-round improvement below which descent stops.
pub const IMPROVEMENT_TOL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "separation")]
    Separation,
    #[serde(rename = "axial_offset_upper")]
    AxialOffsetUpper,
    #[serde(rename = "spacing")]
    Spacing,
    #[serde(rename = "br_upper")]
    BrUpper,
    #[serde(rename = "rhombus_diagonals.d_axial")]
    RhombusAxialDiagonal,
}

impl Param {
    pub const ALL: [Param; 5] =
        [Param::Separation, Param::AxialOffsetUpper, Param::Spacing, Param::BrUpper, Param::RhombusAxialDiagonal];

    pub fn name(self) -> &'static str {
        match self {
            Param::Separation => "separation",
            Param::AxialOffsetUpper => "axial_offset_upper",
            Param::Spacing => "spacing",
            Param::BrUpper => "br_upper",
            Param::RhombusAxialDiagonal => "rhombus_diagonals.d_axial",
        }
    }

    /// Column-safe name for CSV headers.
    pub fn column(self) -> String {
        format!("param_{}", self.name().replace('.', "_"))
    }

    /// Whether the parameter is a length (m) rather than a remanence (T).
    pub fn is_length(self) -> bool {
        self != Param::BrUpper
    }

    pub fn get(self, p: &DesignParams) -> f64 {
        match self {
            Param::Separation => p.separation,
            Param::AxialOffsetUpper => p.axial_offset_upper,
            Param::Spacing => p.spacing,
            Param::BrUpper => p.br_upper,
            Param::RhombusAxialDiagonal => p.rhombus_diagonals.d_axial,
        }
    }

    pub fn set(self, p: &mut DesignParams, v: f64) {
        match self {
            Param::Separation => p.separation = v,
            Param::AxialOffsetUpper => p.axial_offset_upper = v,
            Param::Spacing => p.spacing = v,
            Param::BrUpper => p.br_upper = v,
            Param::RhombusAxialDiagonal => p.rhombus_diagonals.d_axial = v,
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown sweep parameter '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
}

impl SweepAxis {
    pub fn new(param: Param, lower: f64, upper: f64, coarse_step: f64, fine_step: f64) -> Result<Self> {
        let axis = Self { param, lower, upper, coarse_step, fine_step };
        axis.validate()?;
        Ok(axis)
    }

    /// `lower == upper` is allowed and sweeps a single point.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.lower, self.upper, self.coarse_step, self.fine_step].iter().all(|v| v.is_finite());
        if !finite || self.lower > self.upper {
            return Err(Error::InvalidParams(format!(
                "{}: bounds must be finite with lower <= upper",
                self.param.name()
            )));
        }
        if !(self.coarse_step > 0.0 && self.fine_step > 0.0 && self.fine_step <= self.coarse_step) {
            return Err(Error::InvalidParams(format!("{}: steps must satisfy 0 < fine <= coarse", self.param.name())));
        }
        Ok(())
    }

    fn coarse_grid(&self) -> Vec<f64> {
        grid(self.lower, self.upper, self.coarse_step)
    }

    fn fine_grid(&self, center: f64) -> Vec<f64> {
        let lo = (center - self.coarse_step).max(self.lower);
        let hi = (center + self.coarse_step).min(self.upper);
        grid(lo, hi, self.fine_step)
    }
}

/// `lo, lo+step, …` with `hi` always included.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step * (1.0 - 1e-12)).ceil() as usize;
    (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * step }).collect()
}

/// Constraint thresholds and the sampling used by every evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    /// Largest acceptable |B| at the null, T.
    pub null_threshold: f64,
    /// Largest acceptable per-axis |B| along the approach, T.
    pub compensable_limit: f64,
    /// Smallest acceptable separation between the arrays, m.
    pub min_clearance: f64,
    /// Axial window searched for the null, m.
    pub null_window: (f64, f64),
    /// Axial coordinate the approach segment starts from, m.
    pub approach_start: f64,
    pub analysis: AnalysisConfig,
}

impl Default for Objective {
    fn default() -> Self {
        Self {
            null_threshold: 1e-4,
            compensable_limit: 6e-3,
            min_clearance: 1e-3,
            null_window: (10e-6, 10e-3),
            approach_start: 10e-3,
            analysis: AnalysisConfig::default(),
        }
    }
}

impl Objective {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.null_window;
        if !(self.null_threshold > 0.0 && self.compensable_limit > 0.0 && self.min_clearance > 0.0) {
            return Err(Error::InvalidParams("objective thresholds must be positive".into()));
        }
        if !(0.0 <= lo && lo < hi && hi <= self.approach_start) {
            return Err(Error::InvalidParams("need 0 <= null window lo < hi <= approach start".into()));
        }
        Ok(())
    }
}

/// One evaluated design.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub params: DesignParams,
    pub null: Option<NullReport>,
    /// |∂B_z/∂z| at the null, T/m; 0 when no null was found.
    pub gradient: f64,
    /// Per-axis maxima of |B| on the approach, T.
    pub approach: Vec3,
    pub feasible: bool,
    /// Empty when feasible; otherwise every violated constraint or the error.
    pub reason: String,
}

impl Candidate {
    fn failed(params: DesignParams, err: &Error) -> Self {
        Self {
            params,
            null: None,
            gradient: 0.0,
            approach: Vec3::zeros(),
            feasible: false,
            reason: format!("{}: {err}", err.category()),
        }
    }

    pub fn residual(&self) -> Option<f64> {
        self.null.as_ref().map(|n| n.residual_mag)
    }
}

/// Builds the design, finds its null, and checks every constraint. Errors
/// become infeasible candidates rather than aborting.
pub fn evaluate_candidate(params: &DesignParams, objective: &Objective) -> Candidate {
    match try_evaluate(params, objective) {
        Ok(c) => c,
        Err(e) => Candidate::failed(*params, &e),
    }
}

fn try_evaluate(params: &DesignParams, obj: &Objective) -> Result<Candidate> {
    obj.validate()?;
    let assembly = build_dual_layer(params)?;
    let y = params.ion_height;
    // Without a null the approach still runs to the window edge, so an
    // uncompensated offset is reported alongside the missing null.
    let (null, approach_end, mut reasons) = match find_null(&assembly, y, obj.null_window, &obj.analysis) {
        Ok(n) => {
            let z = n.position.z;
            (Some(n), z, Vec::new())
        }
        Err(e @ Error::NoNullFound { .. }) => (None, obj.null_window.0, vec![format!("{}: {e}", e.category())]),
        Err(e) => return Err(e),
    };
    let gradient = match &null {
        Some(n) => axial_gradient_at_null(&assembly, n, obj.analysis.fd_step)?.abs(),
        None => 0.0,
    };
    let approach =
        approach_offsets_between(&assembly, y, obj.approach_start, approach_end, obj.analysis.approach_pitch)?;

    if let Some(n) = &null {
        if n.residual_mag > obj.null_threshold {
            reasons.push(format!("residual {:.4} G > {:.4} G", n.residual_mag * 1e4, obj.null_threshold * 1e4));
        }
    }
    for (name, v) in ["x", "y", "z"].iter().zip(approach.iter()) {
        if *v > obj.compensable_limit {
            reasons.push(format!("approach B{name} {:.4} G > {:.4} G", v * 1e4, obj.compensable_limit * 1e4));
        }
    }
    if params.separation < obj.min_clearance {
        reasons.push(format!("separation {:.4} mm < {:.4} mm", params.separation * 1e3, obj.min_clearance * 1e3));
    }
    Ok(Candidate {
        params: *params,
        null,
        gradient,
        approach,
        feasible: reasons.is_empty(),
        reason: reasons.join("; "),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Every evaluated candidate, in evaluation order.
    pub trace: Vec<Candidate>,
    /// Index into `trace` of the best feasible candidate.
    pub incumbent: Option<usize>,
    /// Swept parameters, in first-swept order.
    pub params: Vec<Param>,
    /// Completed descent rounds (0 for a plain sweep).
    pub rounds: usize,
}

impl SweepResult {
    /// The incumbent, or `NoFeasiblePoint` if nothing feasible was seen.
    pub fn best(&self) -> Result<&Candidate> {
        self.incumbent.map(|i| &self.trace[i]).ok_or(Error::NoFeasiblePoint { evaluated: self.trace.len() })
    }
}

/// Coarse grid, then a fine grid within one coarse step of the best
/// feasible coarse point.
pub fn sweep_1d(base: &DesignParams, axis: &SweepAxis, objective: &Objective) -> Result<SweepResult> {
    sweep_1d_with(base, axis, |p| evaluate_candidate(p, objective))
}

/// [`sweep_1d`] with a caller-supplied evaluator.
pub fn sweep_1d_with<F>(base: &DesignParams, axis: &SweepAxis, eval: F) -> Result<SweepResult>
where
    F: Fn(&DesignParams) -> Candidate + Sync,
{
    axis.validate()?;
    base.validate()?;
    let mut trace = evaluate_values(base, axis.param, &axis.coarse_grid(), &eval);
    if let Some(i) = select_best(&trace, axis.param) {
        let center = axis.param.get(&trace[i].params);
        let tol = axis.fine_step * 1e-9;
        let fresh: Vec<f64> = axis
            .fine_grid(center)
            .into_iter()
            .filter(|v| !trace.iter().any(|c| (axis.param.get(&c.params) - v).abs() <= tol))
            .collect();
        trace.extend(evaluate_values(base, axis.param, &fresh, &eval));
    }
    let incumbent = select_best(&trace, axis.param);
    Ok(SweepResult { trace, incumbent, params: vec![axis.param], rounds: 0 })
}

fn evaluate_values<F>(base: &DesignParams, param: Param, values: &[f64], eval: &F) -> Vec<Candidate>
where
    F: Fn(&DesignParams) -> Candidate + Sync,
{
    values
        .par_iter()
        .map(|&v| {
            let mut p = *base;
            param.set(&mut p, v);
            eval(&p)
        })
        .collect()
}

/// Highest gradient among feasible candidates; ties go to the smallest value
/// of `param`, then to the earliest trace entry.
fn select_best(trace: &[Candidate], param: Param) -> Option<usize> {
    trace
        .iter()
        .enumerate()
        .filter(|(_, c)| c.feasible)
        .reduce(|best, cur| {
            let better = cur.1.gradient > best.1.gradient
                || (cur.1.gradient == best.1.gradient && param.get(&cur.1.params) < param.get(&best.1.params));
            if better {
                cur
            } else {
                best
            }
        })
        .map(|(i, _)| i)
}

/// Repeated per-axis sweeps carrying the incumbent forward. Stops after a
/// round improving the objective by less than [`IMPROVEMENT_TOL`] or after
/// `max_rounds`.
pub fn coordinate_descent(
    base: &DesignParams,
    axes: &[SweepAxis],
    max_rounds: usize,
    objective: &Objective,
) -> Result<SweepResult> {
    coordinate_descent_with(base, axes, max_rounds, |p| evaluate_candidate(p, objective))
}

/// [`coordinate_descent`] with a caller-supplied evaluator.
pub fn coordinate_descent_with<F>(
    base: &DesignParams,
    axes: &[SweepAxis],
    max_rounds: usize,
    eval: F,
) -> Result<SweepResult>
where
    F: Fn(&DesignParams) -> Candidate + Sync,
{
    if axes.is_empty() {
        return Err(Error::InvalidParams("coordinate descent needs at least one axis".into()));
    }
    for a in axes {
        a.validate()?;
    }
    base.validate()?;

    let mut params: Vec<Param> = Vec::new();
    for a in axes {
        if !params.contains(&a.param) {
            params.push(a.param);
        }
    }
    let first = eval(base);
    let mut incumbent = first.feasible.then_some(0);
    let mut trace = vec![first];
    let mut current = *base;
    let mut rounds = 0;

    while rounds < max_rounds {
        let before = incumbent.map(|i| trace[i].gradient);
        for axis in axes {
            let sweep = sweep_1d_with(&current, axis, &eval)?;
            let offset = trace.len();
            let winner = sweep.incumbent.map(|i| i + offset);
            trace.extend(sweep.trace);
            if let Some(w) = winner {
                let improves = match incumbent {
                    None => true,
                    Some(i) => trace[w].gradient > trace[i].gradient,
                };
                if improves {
                    incumbent = Some(w);
                    current = trace[w].params;
                }
            }
        }
        rounds += 1;
        let after = incumbent.map(|i| trace[i].gradient);
        let converged = match (before, after) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(b), Some(a)) => a - b < IMPROVEMENT_TOL * b.abs(),
        };
        if converged {
            break;
        }
    }
    Ok(SweepResult { trace, incumbent, params, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Preset;

    fn synthetic(param: Param, peak: f64) -> impl Fn(&DesignParams) -> Candidate + Sync {
        move |p: &DesignParams| {
            let v = param.get(p);
            Candidate {
                params: *p,
                null: None,
                gradient: 100.0 - 1e6 * (v - peak).powi(2),
                approach: Vec3::zeros(),
                feasible: true,
                reason: String::new(),
            }
        }
    }

    #[test]
    fn grid_includes_both_ends() {
        assert_eq!(grid(1.0, 2.0, 0.25), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(grid(1.0, 1.0, 0.25), vec![1.0]);
        let g = grid(0.0, 1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn axis_validation() {
        assert!(SweepAxis::new(Param::Spacing, 2.0, 1.0, 0.1, 0.01).is_err());
        assert!(SweepAxis::new(Param::Spacing, 1.0, 2.0, 0.1, 0.2).is_err());
        assert!(SweepAxis::new(Param::Spacing, 1.0, 2.0, 0.0, 0.0).is_err());
        assert!(SweepAxis::new(Param::Spacing, 1.0, 1.0, 0.1, 0.1).is_ok());
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert_eq!(Param::RhombusAxialDiagonal.column(), "param_rhombus_diagonals_d_axial");
    }

    #[test]
    fn single_point_axis() {
        let base = DesignParams::default();
        let axis = SweepAxis::new(Param::Separation, 2e-3, 2e-3, 0.25e-3, 0.05e-3).unwrap();
        let r = sweep_1d_with(&base, &axis, synthetic(Param::Separation, 0.0)).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.best().unwrap().params.separation, 2e-3);
    }

    #[test]
    fn synthetic_quadratic_argmax() {
        let base = DesignParams::default();
        let peak = 2.2137e-3;
        let axis = SweepAxis::new(Param::Separation, 1.5e-3, 3.5e-3, 0.25e-3, 0.01e-3).unwrap();
        let r = sweep_1d_with(&base, &axis, synthetic(Param::Separation, peak)).unwrap();
        let best = r.best().unwrap().params.separation;
        assert!((best - peak).abs() <= 0.01e-3, "best {best}");
        // every candidate once
        let mut vals: Vec<f64> = r.trace.iter().map(|c| c.params.separation).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        assert_eq!(vals.len(), r.trace.len());
    }

    #[test]
    fn ties_prefer_smaller_value() {
        let base = DesignParams::default();
        let flat = |p: &DesignParams| Candidate {
            params: *p,
            null: None,
            gradient: 7.0,
            approach: Vec3::zeros(),
            feasible: true,
            reason: String::new(),
        };
        let axis = SweepAxis::new(Param::BrUpper, 0.2, 0.8, 0.2, 0.1).unwrap();
        let r = sweep_1d_with(&base, &axis, flat).unwrap();
        assert_eq!(r.best().unwrap().params.br_upper, 0.2);
    }

    #[test]
    fn nothing_feasible_keeps_trace() {
        let base = DesignParams::default();
        let never = |p: &DesignParams| Candidate {
            params: *p,
            null: None,
            gradient: 1.0,
            approach: Vec3::zeros(),
            feasible: false,
            reason: "synthetic".into(),
        };
        let axis = SweepAxis::new(Param::BrUpper, 0.2, 0.8, 0.2, 0.1).unwrap();
        let r = sweep_1d_with(&base, &axis, never).unwrap();
        assert_eq!(r.trace.len(), 4);
        assert!(matches!(r.best(), Err(Error::NoFeasiblePoint { evaluated: 4 })));
    }

    #[test]
    fn zero_rounds_returns_base() {
        let base = DesignParams::default();
        let axis = SweepAxis::new(Param::BrUpper, 0.2, 0.8, 0.2, 0.1).unwrap();
        let r = coordinate_descent_with(&base, &[axis], 0, synthetic(Param::BrUpper, 0.5)).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.rounds, 0);
        assert_eq!(r.best().unwrap().params, base);
    }

    #[test]
    fn descent_finds_separable_optimum_and_is_monotone() {
        let base = DesignParams::default();
        let axes = [
            SweepAxis::new(Param::Separation, 1.5e-3, 3.5e-3, 0.25e-3, 0.05e-3).unwrap(),
            SweepAxis::new(Param::BrUpper, 0.0, 1.0, 0.1, 0.02).unwrap(),
        ];
        let eval = |p: &DesignParams| Candidate {
            params: *p,
            null: None,
            gradient: 50.0 - 1e6 * (p.separation - 2.6e-3).powi(2) - 10.0 * (p.br_upper - 0.34).powi(2),
            approach: Vec3::zeros(),
            feasible: true,
            reason: String::new(),
        };
        let r = coordinate_descent_with(&base, &axes, 10, eval).unwrap();
        let best = r.best().unwrap();
        assert!((best.params.separation - 2.6e-3).abs() <= 0.05e-3);
        assert!((best.params.br_upper - 0.34).abs() <= 0.02 + 1e-12);
        assert!(r.rounds >= 1 && r.rounds <= 10);
        assert!(best.gradient >= r.trace[0].gradient);
    }

    #[test]
    fn empty_axes_rejected() {
        let r = coordinate_descent(&DesignParams::default(), &[], 1, &Objective::default());
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn overlap_is_an_infeasible_reason() {
        let mut p = Preset::OptimizedS3_1.params();
        p.spacing = 0.3e-3;
        let c = evaluate_candidate(&p, &Objective::default());
        assert!(!c.feasible);
        assert!(c.reason.starts_with("OverlappingMagnets"), "{}", c.reason);
    }

    #[test]
    fn uncompensated_design_violates_approach_limit() {
        let mut p = Preset::OptimizedS3_1.params();
        p.br_upper = 0.0;
        let c = evaluate_candidate(&p, &Objective::default());
        assert!(!c.feasible);
        assert!(c.reason.contains("approach B"), "{}", c.reason);
    }

    #[test]
    fn clearance_violation_reported() {
        let mut p = Preset::OptimizedS3_1.params();
        p.separation = 0.8e-3;
        let c = evaluate_candidate(&p, &Objective::default());
        assert!(!c.feasible);
        assert!(c.reason.contains("separation"), "{}", c.reason);
    }

    #[test]
    fn evaluation_is_reproducible() {
        let p = Preset::OptimizedS3_1.params();
        let a = evaluate_candidate(&p, &Objective::default());
        let b = evaluate_candidate(&p, &Objective::default());
        assert_eq!(a, b);
    }
}
