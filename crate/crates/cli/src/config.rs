//! TOML configuration files and command-line value parsing. Lengths accept
//! `m`, `mm` or `um` suffixes; bare numbers are meters.

use std::fs;
use std::path::Path;

use halbach::array::{DesignParams, Preset, RotationPlane};
use halbach::ion::ShuttlePath;
use halbach::magnetics::gauss_to_tesla;
use halbach::optimizer::{Objective, Param, SweepAxis};
use halbach::scene::{ModulePlacement, Scene, Yaw};
use halbach::units::{deserialize_length, parse_length};
use halbach::Vec3;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// A design given by preset name, design file, or both (file values
/// override the preset). The default base is `optimized_s3_1`.
pub fn resolve_design(
    preset: Option<&str>,
    file: Option<&Path>,
    plane: Option<RotationPlane>,
) -> CliResult<DesignParams> {
    let mut table = match file {
        Some(path) => read_text(path)?.parse::<toml::Table>().map_err(config_err)?,
        None => toml::Table::new(),
    };
    let from_file = table.remove("preset").map(|v| match v {
        toml::Value::String(s) => Ok(s),
        other => Err(config_err(format!("preset must be a string, got {other}"))),
    });
    let base_name = match (preset, from_file) {
        (Some(p), _) => p.to_string(),
        (None, Some(p)) => p?,
        (None, None) => Preset::OptimizedS3_1.name().to_string(),
    };
    let base: Preset = base_name.parse().map_err(config_err)?;
    let mut params = design_from_table(base.params(), table)?;
    if let Some(plane) = plane {
        params.rotation_plane = plane;
    }
    params.validate()?;
    Ok(params)
}

/// Applies the keys of `overrides` on top of `base`.
pub fn design_from_table(base: DesignParams, overrides: toml::Table) -> CliResult<DesignParams> {
    let mut merged = toml::Table::try_from(base).map_err(config_err)?;
    merge(&mut merged, overrides);
    toml::Value::Table(merged).try_into().map_err(config_err)
}

fn merge(into: &mut toml::Table, from: toml::Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(toml::Value::Table(a)), toml::Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

pub fn parse_plane(s: &str) -> CliResult<RotationPlane> {
    match s {
        "xy" => Ok(RotationPlane::Xy),
        "yz" => Ok(RotationPlane::Yz),
        _ => Err(config_err(format!("rotation plane must be xy or yz, got '{s}'"))),
    }
}

/// `x,y,z` with per-component length suffixes.
pub fn parse_vec3(s: &str) -> CliResult<Vec3> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(config_err(format!("expected x,y,z, got '{s}'")));
    }
    let mut v = Vec3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = parse_length(p).map_err(config_err)?;
    }
    Ok(v)
}

/// `x,y,z;x,y,z;…`
pub fn parse_polyline(s: &str) -> CliResult<Vec<Vec3>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_vec3).collect()
}

/// `lo:hi` as lengths.
pub fn parse_span(s: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi] => Ok((parse_length(lo).map_err(config_err)?, parse_length(hi).map_err(config_err)?)),
        _ => Err(config_err(format!("expected lo:hi, got '{s}'"))),
    }
}

/// `lo:hi:n` as lengths and a sample count.
pub fn parse_range(s: &str) -> CliResult<((f64, f64), usize)> {
    let (span, n) = s.rsplit_once(':').ok_or_else(|| config_err(format!("expected lo:hi:n, got '{s}'")))?;
    let n: usize = n.trim().parse().map_err(|_| config_err(format!("bad sample count in '{s}'")))?;
    Ok((parse_span(span)?, n))
}

/// `y=0.5mm` style plane selector.
pub fn parse_axis_plane(s: &str) -> CliResult<(halbach::analysis::Axis, f64)> {
    use halbach::analysis::Axis;
    let (axis, value) = s.split_once('=').ok_or_else(|| config_err(format!("expected axis=value, got '{s}'")))?;
    let axis = match axis.trim() {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        a => return Err(config_err(format!("unknown axis '{a}'"))),
    };
    Ok((axis, parse_length(value).map_err(config_err)?))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Length(#[serde(deserialize_with = "deserialize_length")] f64);

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisEntry {
    param: String,
    lower: Length,
    upper: Length,
    coarse: Length,
    fine: Length,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ObjectiveEntry {
    null_threshold_gauss: Option<f64>,
    compensable_limit_gauss: Option<f64>,
    min_clearance: Option<Length>,
    null_window: Option<[Length; 2]>,
    approach_start: Option<Length>,
    scan_pitch: Option<Length>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    preset: Option<String>,
    design: Option<toml::Table>,
    rounds: Option<usize>,
    #[serde(default)]
    objective: ObjectiveEntry,
    axis: Vec<AxisEntry>,
}

/// Parsed sweep or descent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: DesignParams,
    pub axes: Vec<SweepAxis>,
    pub objective: Objective,
    pub rounds: usize,
}

pub const DEFAULT_DESCENT_ROUNDS: usize = 5;

pub fn parse_sweep_config(text: &str) -> CliResult<SweepConfig> {
    let f: SweepFile = toml::from_str(text).map_err(config_err)?;
    let preset: Preset = f.preset.as_deref().unwrap_or(Preset::OptimizedS3_1.name()).parse().map_err(config_err)?;
    let base = design_from_table(preset.params(), f.design.unwrap_or_default())?;
    base.validate()?;
    let axes = f
        .axis
        .iter()
        .map(|a| {
            let param: Param = a.param.parse().map_err(config_err)?;
            SweepAxis::new(param, a.lower.0, a.upper.0, a.coarse.0, a.fine.0).map_err(CliError::from)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if axes.is_empty() {
        return Err(config_err("at least one [[axis]] is required"));
    }
    let mut objective = Objective::default();
    let o = f.objective;
    if let Some(g) = o.null_threshold_gauss {
        objective.null_threshold = gauss_to_tesla(g);
    }
    if let Some(g) = o.compensable_limit_gauss {
        objective.compensable_limit = gauss_to_tesla(g);
    }
    if let Some(l) = o.min_clearance {
        objective.min_clearance = l.0;
    }
    if let Some([lo, hi]) = o.null_window {
        objective.null_window = (lo.0, hi.0);
    }
    if let Some(l) = o.approach_start {
        objective.approach_start = l.0;
    }
    if let Some(l) = o.scan_pitch {
        objective.analysis.scan_pitch = l.0;
    }
    objective.validate()?;
    Ok(SweepConfig { base, axes, objective, rounds: f.rounds.unwrap_or(DEFAULT_DESCENT_ROUNDS) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleEntry {
    label: Option<String>,
    preset: Option<String>,
    design: Option<toml::Table>,
    translation: [Length; 3],
    #[serde(default)]
    yaw: i64,
    #[serde(default)]
    optional: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorridorEntry {
    waypoints: Vec<[Length; 3]>,
    speed: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default)]
    module: Vec<ModuleEntry>,
    #[serde(default)]
    corridor: Vec<CorridorEntry>,
}

pub fn parse_scene_config(text: &str) -> CliResult<Scene> {
    let f: SceneFile = toml::from_str(text).map_err(config_err)?;
    let mut placements = Vec::new();
    for (i, m) in f.module.into_iter().enumerate() {
        let preset: Preset = m.preset.as_deref().unwrap_or(Preset::OptimizedS3_1.name()).parse().map_err(config_err)?;
        let design = design_from_table(preset.params(), m.design.unwrap_or_default())?;
        design.validate()?;
        let t = Vec3::new(m.translation[0].0, m.translation[1].0, m.translation[2].0);
        let mut p = ModulePlacement::new(
            m.label.unwrap_or_else(|| format!("module_{i}")),
            design,
            t,
            Yaw::from_degrees(m.yaw)?,
        );
        p.optional = m.optional;
        placements.push(p);
    }
    let corridors = f
        .corridor
        .into_iter()
        .map(|c| {
            let pts = c.waypoints.iter().map(|w| Vec3::new(w[0].0, w[1].0, w[2].0)).collect();
            ShuttlePath::new(pts, c.speed.unwrap_or(halbach::scene::DEFAULT_CORRIDOR_SPEED)).map_err(CliError::from)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Scene { placements, corridors })
}
