//! One-command regeneration of the reference figures and numbers, each
//! compared against a tolerance band.

use std::fmt::Write as _;

use halbach::analysis::{
    approach_offsets, axial_gradient_at_null, axial_gradient_bound, extinction_distance, find_null, sample_grid,
    sample_line, AnalysisConfig, Axis, GridSpec, LineSpec, NullReport,
};
use halbach::array::{build_dual_layer, DesignParams, Preset, RotationPlane};
use halbach::ion::{lorentz_estimate, Confinement, IonSpecies, ShuttlePath};
use halbach::magnetics::{gauss_to_tesla, DEFAULT_FD_STEP};
use halbach::optimizer::{coordinate_descent, sweep_1d, Objective, Param, SweepAxis, SweepResult};
use halbach::scene::{corridor_report, ModulePlacement, Scene, Yaw, DEFAULT_CORRIDOR_PITCH, DEFAULT_CORRIDOR_SPEED};
use halbach::{Assembly, Vec3};

use crate::output::{field_csv, num, sweep_csv, Summary};

/// Axial window searched for nulls, m.
pub const NULL_WINDOW: (f64, f64) = (10e-6, 10e-3);
/// Start of the weak-side approach segment, m.
pub const APPROACH_START: f64 = 10e-3;
/// Axial distance at which the reference designs place their null, m.
pub const REFERENCE_NULL_DISTANCE: f64 = 1.6e-3;
/// Samples in the ion-line profile artifacts.
pub const PROFILE_SAMPLES: usize = 1000;
/// Weak-side extinction threshold, T.
pub const EXTINCTION_THRESHOLD: f64 = 1e-4;
/// Axial distance of the informational corridor in front of a module, m.
pub const CORRIDOR_CLEARANCE: f64 = 10e-3;

pub const PLANES: [RotationPlane; 2] = [RotationPlane::Xy, RotationPlane::Yz];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Fig3,
    Fig4,
    Fig6,
    Fig9,
    #[value(name = "lorentz_s1")]
    LorentzS1,
    #[value(name = "optimum_s3_1")]
    OptimumS3_1,
    Extinction,
    All,
}

/// A measured value against an inclusive band. A missing value fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    /// Upper bound excluded from the band.
    pub hi_strict: bool,
    pub pass: bool,
}

impl Check {
    pub fn band(name: impl Into<String>, value: Option<f64>, lo: Option<f64>, hi: Option<f64>) -> Self {
        Self::build(name.into(), value, lo, hi, false)
    }

    pub fn below(name: impl Into<String>, value: Option<f64>, hi: f64) -> Self {
        Self::build(name.into(), value, None, Some(hi), true)
    }

    pub fn around(name: impl Into<String>, value: Option<f64>, center: f64, rel: f64) -> Self {
        Self::band(name, value, Some(center * (1.0 - rel)), Some(center * (1.0 + rel)))
    }

    fn build(name: String, value: Option<f64>, lo: Option<f64>, hi: Option<f64>, hi_strict: bool) -> Self {
        let pass = value.is_some_and(|v| {
            v.is_finite() && lo.is_none_or(|l| v >= l) && hi.is_none_or(|h| if hi_strict { v < h } else { v <= h })
        });
        Self { name, value, lo, hi, hi_strict, pass }
    }

    pub fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "-".into());
        format!(
            "check.{} = value={} lo={} hi={}{} pass={}",
            self.name,
            opt(self.value),
            opt(self.lo),
            opt(self.hi),
            if self.hi_strict { " (exclusive)" } else { "" },
            self.pass
        )
    }
}

/// Result of one acceptance criterion, or of an artifact-only target
/// (`criterion == 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub criterion: u8,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub notes: Summary,
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    fn new(criterion: u8, title: &str) -> Self {
        Self {
            criterion,
            title: title.into(),
            pass: false,
            checks: Vec::new(),
            notes: Summary::new(),
            artifacts: Vec::new(),
        }
    }

    fn all_checks_pass(&mut self) -> &mut Self {
        self.pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn line(&self) -> String {
        format!("criterion {} {} {}", self.criterion, if self.pass { "PASS" } else { "FAIL" }, self.title)
    }

    pub fn render(&self) -> String {
        let mut out = format!("[{}]\n", self.title.replace(' ', "_"));
        let _ = writeln!(out, "criterion = {}", self.criterion);
        let _ = writeln!(out, "pass = {}", self.pass);
        out.push_str(&self.notes.render());
        for c in &self.checks {
            out.push_str(&c.render());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    /// Banded outcomes that failed.
    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.criterion > 0 && !o.pass).count()
    }

    pub fn banded(&self) -> usize {
        self.outcomes.iter().filter(|o| o.criterion > 0).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            if o.criterion > 0 {
                out.push_str(&o.line());
                out.push('\n');
            }
        }
        for o in &self.outcomes {
            out.push('\n');
            out.push_str(&o.render());
        }
        out
    }

    /// Every artifact plus `report.txt`, sorted by file name.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files: Vec<(String, String)> = self.outcomes.iter().flat_map(|o| o.artifacts.iter().cloned()).collect();
        files.push(("report.txt".into(), self.render()));
        files.sort_by(|a, b| a.0.cmp(&b.0));
        files.dedup_by(|a, b| a.0 == b.0);
        files
    }
}

/// Runs `target`. `design` replaces every preset design when given.
pub fn reproduce(target: Target, design: Option<&DesignParams>) -> Report {
    let outcomes = match target {
        Target::Fig3 => vec![fig3(design)],
        Target::Fig4 => vec![naive_null(design)],
        Target::Fig6 => vec![rhombic_null(design)],
        Target::Fig9 => vec![fig9(design)],
        Target::LorentzS1 => vec![lorentz_s1()],
        Target::OptimumS3_1 => vec![optimized_design(design), optimizer_neighborhood(design)],
        Target::Extinction => vec![extinction(design)],
        Target::All => vec![
            lorentz_s1(),
            naive_null(design),
            rhombic_null(design),
            optimized_design(design),
            extinction(design),
            optimizer_neighborhood(design),
            fig3(design),
            fig9(design),
        ],
    };
    Report { outcomes }
}

fn design_for(preset: Preset, design: Option<&DesignParams>, plane: RotationPlane) -> DesignParams {
    let mut p = design.copied().unwrap_or_else(|| preset.params());
    p.rotation_plane = plane;
    p
}

/// Null, gradient and approach maxima of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct NullEvaluation {
    pub null: Option<NullReport>,
    pub gradient: Option<f64>,
    pub approach: Option<Vec3>,
    pub error: Option<String>,
}

pub fn evaluate_null(params: &DesignParams) -> NullEvaluation {
    let run = || -> halbach::Result<(NullReport, f64, Vec3)> {
        let a = build_dual_layer(params)?;
        let cfg = AnalysisConfig::default();
        let null = find_null(&a, params.ion_height, NULL_WINDOW, &cfg)?;
        let g = axial_gradient_at_null(&a, &null, cfg.fd_step)?.abs();
        let approach = approach_offsets(&a, params.ion_height, APPROACH_START, &null, cfg.approach_pitch)?;
        Ok((null, g, approach))
    };
    match run() {
        Ok((null, g, approach)) => {
            NullEvaluation { null: Some(null), gradient: Some(g), approach: Some(approach), error: None }
        }
        Err(e) => {
            NullEvaluation { null: None, gradient: None, approach: None, error: Some(format!("{}: {e}", e.category())) }
        }
    }
}

fn note_evaluation(notes: &mut Summary, prefix: &str, ev: &NullEvaluation) {
    match (&ev.null, &ev.error) {
        (Some(n), _) => {
            notes.null_report(prefix, n);
        }
        (None, Some(e)) => {
            notes.text(format!("{prefix}error"), e.clone());
        }
        _ => {}
    }
    if let Some(g) = ev.gradient {
        notes.value(format!("{prefix}axial_gradient_T_per_m"), g);
    }
    if let Some(a) = ev.approach {
        notes
            .field_g(format!("{prefix}approach_max_Bx_G"), a.x)
            .field_g(format!("{prefix}approach_max_By_G"), a.y)
            .field_g(format!("{prefix}approach_max_Bz_G"), a.z);
    }
}

/// Largest |∂B_z/∂z| any magnetization of the design's shapes could produce
/// at the reference null position.
pub fn gradient_bound(params: &DesignParams) -> Option<f64> {
    let a = build_dual_layer(params).ok()?;
    let p = Vec3::new(0.0, params.ion_height, REFERENCE_NULL_DISTANCE);
    axial_gradient_bound(&a, &p, params.br_lower.max(params.br_upper), DEFAULT_FD_STEP).ok()
}

fn ion_line_profile(params: &DesignParams) -> halbach::Result<String> {
    let a = build_dual_layer(params)?;
    let y = params.ion_height;
    let spec = LineSpec::new(Vec3::new(0.0, y, NULL_WINDOW.0), Vec3::new(0.0, y, NULL_WINDOW.1), PROFILE_SAMPLES)?;
    Ok(field_csv(&sample_line(&a, &spec, true, DEFAULT_FD_STEP)?))
}

fn push_profile(o: &mut Outcome, name: &str, params: &DesignParams) {
    match ion_line_profile(params) {
        Ok(csv) => o.artifacts.push((name.into(), csv)),
        Err(e) => {
            o.notes.text(format!("{name}.error"), format!("{}: {e}", e.category()));
        }
    }
}

/// Checks a null criterion in both rotation-plane readings; it passes if
/// either reading passes all of `band`'s checks.
fn plane_criterion<F>(o: &mut Outcome, preset: Preset, design: Option<&DesignParams>, band: F)
where
    F: Fn(&str, &NullEvaluation) -> Vec<Check>,
{
    let mut matched = Vec::new();
    for plane in PLANES {
        let params = design_for(preset, design, plane);
        let ev = evaluate_null(&params);
        let prefix = format!("{}.", plane.name());
        note_evaluation(&mut o.notes, &prefix, &ev);
        if let Some(b) = gradient_bound(&params) {
            o.notes.value(format!("{prefix}gradient_bound_at_reference_T_per_m"), b);
        }
        let checks = band(plane.name(), &ev);
        if checks.iter().all(|c| c.pass) {
            matched.push(plane.name());
        }
        o.checks.extend(checks);
        push_profile(o, &format!("line_{}_{}.csv", preset.name(), plane.name()), &params);
    }
    o.pass = !matched.is_empty();
    o.notes.text("rotation_plane_default", RotationPlane::Xy.name());
    o.notes.text("rotation_plane_matched", if matched.is_empty() { "none".into() } else { matched.join(",") });
}

fn mm(v: Option<f64>) -> Option<f64> {
    v.map(|x| x * 1e3)
}

fn gauss(v: Option<f64>) -> Option<f64> {
    v.map(|x| x * 1e4)
}

/// Criterion 1: worst-case Lorentz force on a shuttled ion.
pub fn lorentz_s1() -> Outcome {
    let mut o = Outcome::new(1, "lorentz estimate");
    let ion = IonSpecies::yb171();
    let e = lorentz_estimate(&ion, 1.6, 0.25, &Confinement::default());
    o.notes
        .text("species", ion.label.clone())
        .value("speed_m_per_s", 1.6)
        .value("field_T", 0.25)
        .value("force_N", e.force)
        .value("acceleration_m_per_s2", e.acceleration)
        .value("ratio_to_radial_confinement", e.ratio_to_radial)
        .value("ratio_to_axial_confinement", e.ratio_to_axial);
    o.checks.push(Check::around("force_N", Some(e.force), 6.4e-20, 0.02));
    o.checks.push(Check::around("acceleration_m_per_s2", Some(e.acceleration), 2.3e5, 0.02));
    o.artifacts.push(("lorentz_s1.txt".into(), o.notes.render()));
    o.all_checks_pass();
    o
}

/// Criterion 2: null of the all-cuboid design.
pub fn naive_null(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(2, "naive design null");
    plane_criterion(&mut o, Preset::NaiveS2, design, |plane, ev| {
        let n = ev.null.as_ref();
        vec![
            Check::band(
                format!("{plane}.distance_from_edge_mm"),
                mm(n.map(|n| n.distance_from_edge)),
                Some(1.3),
                Some(1.9),
            ),
            Check::below(format!("{plane}.residual_G"), gauss(n.map(|n| n.residual_mag)), 5.0),
            Check::band(format!("{plane}.axial_gradient_T_per_m"), ev.gradient, Some(75.0), Some(110.0)),
        ]
    });
    o
}

/// Criterion 3: null of the unoptimized rhombic-center design.
pub fn rhombic_null(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(3, "rhombic design null");
    plane_criterion(&mut o, Preset::RhombicS3, design, |plane, ev| {
        let n = ev.null.as_ref();
        vec![
            Check::band(
                format!("{plane}.distance_from_edge_mm"),
                mm(n.map(|n| n.distance_from_edge)),
                Some(1.6),
                Some(2.4),
            ),
            Check::around(format!("{plane}.axial_gradient_T_per_m"), ev.gradient, 10.0, 0.3),
        ]
    });
    o
}

/// Criterion 4: gradient and approach offsets of the tuned design.
pub fn optimized_design(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(4, "optimized design");
    plane_criterion(&mut o, Preset::OptimizedS3_1, design, |plane, ev| {
        let n = ev.null.as_ref();
        let a = ev.approach;
        let mut by = Check::around(format!("{plane}.approach_max_By_G"), gauss(a.map(|a| a.y)), 50.0, 0.2);
        let mut bz = Check::around(format!("{plane}.approach_max_Bz_G"), gauss(a.map(|a| a.z)), 55.0, 0.2);
        for c in [&mut by, &mut bz] {
            c.hi = c.hi.map(|h| h.min(60.0));
            *c = Check::band(c.name.clone(), c.value, c.lo, c.hi);
        }
        vec![
            Check::around(format!("{plane}.axial_gradient_T_per_m"), ev.gradient, 51.0, 0.2),
            Check::band(format!("{plane}.residual_G"), gauss(n.map(|n| n.residual_mag)), None, Some(1.0)),
            by,
            bz,
        ]
    });
    o
}

/// Criterion 5: weak-side reach of the field for the cuboid and tuned designs.
pub fn extinction(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(5, "extinction distance");
    let cfg = AnalysisConfig::default();
    let mut matched = Vec::new();
    let mut table = Summary::new();
    for plane in PLANES {
        let mut plane_checks = Vec::new();
        for preset in [Preset::NaiveS2, Preset::OptimizedS3_1] {
            let params = design_for(preset, design, plane);
            let key = format!("{}.{}", plane.name(), preset.name());
            let d = build_dual_layer(&params)
                .and_then(|a| extinction_distance(&a, params.ion_height, EXTINCTION_THRESHOLD, &cfg));
            match &d {
                Ok(v) => {
                    table.length_mm(format!("{key}.extinction_mm"), *v);
                }
                Err(e) => {
                    table.text(format!("{key}.error"), format!("{}: {e}", e.category()));
                }
            }
            plane_checks.push(Check::band(
                format!("{key}.extinction_mm"),
                mm(d.ok()),
                Some(7.0 / 1.5),
                Some(7.0 * 1.5),
            ));
        }
        if plane_checks.iter().all(|c| c.pass) {
            matched.push(plane.name());
        }
        o.checks.extend(plane_checks);
    }
    table.field_g("threshold_G", EXTINCTION_THRESHOLD);
    corridor_clearance_note(&mut table, design);
    o.notes.extend(&table);
    o.notes.text("rotation_plane_matched", if matched.is_empty() { "none".into() } else { matched.join(",") });
    o.pass = !matched.is_empty();
    o.artifacts.push(("extinction.txt".into(), table.render()));
    o
}

/// Informational: a corridor 10 mm in front of an isolated tuned module,
/// against the extinction threshold. Not part of the band check.
fn corridor_clearance_note(s: &mut Summary, design: Option<&DesignParams>) {
    let params = design_for(Preset::OptimizedS3_1, design, RotationPlane::Xy);
    let y = params.ion_height;
    let result = ShuttlePath::new(
        vec![Vec3::new(-10e-3, y, CORRIDOR_CLEARANCE), Vec3::new(10e-3, y, CORRIDOR_CLEARANCE)],
        DEFAULT_CORRIDOR_SPEED,
    )
    .and_then(|path| {
        let scene = Scene {
            placements: vec![ModulePlacement::new("module", params, Vec3::zeros(), Yaw::Deg0)],
            corridors: vec![path],
        };
        corridor_report(&scene, DEFAULT_CORRIDOR_PITCH, EXTINCTION_THRESHOLD)
    });
    s.length_mm("corridor_clearance_mm", CORRIDOR_CLEARANCE);
    match result {
        Ok(r) => {
            s.field_g("corridor.max_Bmag_G", r[0].max_b)
                .text("corridor.below_threshold", (r[0].flagged == 0).to_string());
        }
        Err(e) => {
            s.text("corridor.error", format!("{}: {e}", e.category()));
        }
    }
}

/// The swept axes, in tuning order, used for the neighborhood check.
pub fn descent_axes() -> Vec<SweepAxis> {
    [
        (Param::Separation, 1.5e-3, 3.5e-3, 0.25e-3, 0.05e-3),
        (Param::AxialOffsetUpper, -0.5e-3, 0.5e-3, 0.1e-3, 0.02e-3),
        (Param::Spacing, 1.0e-3, 2.0e-3, 0.25e-3, 0.05e-3),
        (Param::BrUpper, 0.0, 1.0, 0.1, 0.02),
    ]
    .into_iter()
    .map(|(p, lo, hi, c, f)| SweepAxis::new(p, lo, hi, c, f).expect("static axes are valid"))
    .collect()
}

pub const DESCENT_ROUNDS: usize = 5;

pub fn descent_summary(result: &SweepResult) -> Summary {
    let mut s = Summary::new();
    s.text("evaluated", result.trace.len().to_string())
        .text("rounds", result.rounds.to_string())
        .text("feasible_count", result.trace.iter().filter(|c| c.feasible).count().to_string());
    match result.best() {
        Ok(c) => {
            s.text("incumbent", "found");
            for p in &result.params {
                let v = p.get(&c.params);
                if p.is_length() {
                    s.length_mm(format!("incumbent.{}_mm", p.name()), v);
                } else {
                    s.value(format!("incumbent.{}_T", p.name()), v);
                }
            }
            s.value("incumbent.gradient_T_per_m", c.gradient)
                .field_g("incumbent.approach_max_By_G", c.approach.y)
                .field_g("incumbent.approach_max_Bz_G", c.approach.z);
            if let Some(r) = c.residual() {
                s.field_g("incumbent.residual_G", r);
            }
        }
        Err(e) => {
            s.text("incumbent", format!("{}: {e}", e.category()));
            // closest miss, for diagnosis
            if let Some(c) = result
                .trace
                .iter()
                .filter(|c| c.residual().is_some())
                .min_by(|a, b| a.residual().unwrap().total_cmp(&b.residual().unwrap()))
            {
                s.field_g("lowest_residual_G", c.residual().unwrap())
                    .value("lowest_residual.gradient_T_per_m", c.gradient)
                    .text("lowest_residual.reason", c.reason.clone());
            }
        }
    }
    s
}

/// Criterion 6: automated tuning from the rhombic design.
pub fn optimizer_neighborhood(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(6, "optimizer neighborhood");
    let base = design.copied().unwrap_or_else(|| Preset::RhombicS3.params());
    let objective = Objective::default();
    o.notes
        .text("base", if design.is_some() { "override" } else { Preset::RhombicS3.name() })
        .text("rotation_plane", base.rotation_plane.name())
        .field_g("null_threshold_G", objective.null_threshold)
        .field_g("compensable_limit_G", objective.compensable_limit)
        .length_mm("min_clearance_mm", objective.min_clearance);
    separation_sweep_note(&mut o.notes, &base, &objective);
    match coordinate_descent(&base, &descent_axes(), DESCENT_ROUNDS, &objective) {
        Ok(result) => {
            let summary = descent_summary(&result);
            o.notes.extend(&summary);
            let best = result.best().ok();
            o.checks.push(Check::band(
                "feasible_incumbent",
                Some(if best.is_some() { 1.0 } else { 0.0 }),
                Some(1.0),
                None,
            ));
            o.checks.push(Check::band("separation_mm", mm(best.map(|c| c.params.separation)), Some(2.0), Some(2.5)));
            o.checks.push(Check::band(
                "axial_offset_upper_mm",
                mm(best.map(|c| c.params.axial_offset_upper)),
                Some(-0.1),
                Some(0.1),
            ));
            o.checks.push(Check::band("gradient_T_per_m", best.map(|c| c.gradient), Some(45.0), None));
            o.artifacts.push(("descent_trace.csv".into(), sweep_csv(&result)));
            o.artifacts.push(("descent_summary.txt".into(), summary.render()));
        }
        Err(e) => {
            o.notes.text("error", format!("{}: {e}", e.category()));
            o.checks.push(Check::band("feasible_incumbent", None, Some(1.0), None));
        }
    }
    o.all_checks_pass();
    o
}

/// Informational: the separation axis alone, swept from the base design.
fn separation_sweep_note(s: &mut Summary, base: &DesignParams, objective: &Objective) {
    let axis = descent_axes()[0];
    match sweep_1d(base, &axis, objective).and_then(|r| r.best().map(|c| c.params.separation)) {
        Ok(v) => {
            s.length_mm("separation_sweep.incumbent_mm", v)
                .text("separation_sweep.within_band", ((v - 2.25e-3).abs() <= 0.25e-3 + 1e-12).to_string());
        }
        Err(e) => {
            s.text("separation_sweep.incumbent", format!("{}: {e}", e.category()));
        }
    }
}

/// Vertical-plane contour grid of the cuboid design plus the mirror-plane
/// check on every preset.
pub fn fig3(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(7, "mirror plane symmetry");
    let params = design_for(Preset::NaiveS2, design, RotationPlane::Xy);
    let margin = 0.05e-3;
    let grid = GridSpec {
        normal: Axis::X,
        offset: 0.0,
        first: (margin, params.separation - margin),
        n_first: 39,
        second: (-4e-3, NULL_WINDOW.1),
        n_second: 141,
    };
    match build_dual_layer(&params).and_then(|a| sample_grid(&a, &grid)) {
        Ok(profile) => o.artifacts.push(("grid_naive_s2_x0.csv".into(), field_csv(&profile))),
        Err(e) => {
            o.notes.text("grid.error", format!("{}: {e}", e.category()));
        }
    }
    for preset in Preset::ALL {
        let params = design_for(preset, design, RotationPlane::Xy);
        let bx = mirror_bx(&params);
        if let Err(e) = &bx {
            o.notes.text(format!("{}.error", preset.name()), format!("{}: {e}", e.category()));
        }
        o.checks.push(Check::band(format!("{}.max_abs_Bx_T", preset.name()), bx.ok(), None, Some(1e-7)));
    }
    o.all_checks_pass();
    o
}

/// Largest |B_x| along the ion line of a design.
pub fn mirror_bx(params: &DesignParams) -> halbach::Result<f64> {
    let a: Assembly = build_dual_layer(params)?;
    let y = params.ion_height;
    let spec = LineSpec::new(Vec3::new(0.0, y, NULL_WINDOW.0), Vec3::new(0.0, y, NULL_WINDOW.1), 200)?;
    let profile = sample_line(&a, &spec, false, DEFAULT_FD_STEP)?;
    Ok(profile.b.iter().map(|b| b.x.abs()).fold(0.0, f64::max))
}

/// Ion-line profiles and approach maxima of the tuned design.
pub fn fig9(design: Option<&DesignParams>) -> Outcome {
    let mut o = Outcome::new(0, "optimized design profiles");
    for plane in PLANES {
        let params = design_for(Preset::OptimizedS3_1, design, plane);
        let ev = evaluate_null(&params);
        note_evaluation(&mut o.notes, &format!("{}.", plane.name()), &ev);
        push_profile(&mut o, &format!("line_optimized_s3_1_{}.csv", plane.name()), &params);
    }
    o.notes.field_g("compensable_limit_G", gauss_to_tesla(60.0));
    o.artifacts.push(("fig9_summary.txt".into(), o.notes.render()));
    o.pass = true;
    o
}
