//! Fixed-format text emitters. Every number goes through [`num`], so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use halbach::analysis::{FieldProfile, NullReport};
use halbach::array::DesignParams;
use halbach::ion::ExposureProfile;
use halbach::magnetics::tesla_to_gauss;
use halbach::optimizer::{Param, SweepResult};
use halbach::Vec3;

use crate::error::{CliError, CliResult};

pub const FIELD_HEADER: &str = "x_mm,y_mm,z_mm,Bx_G,By_G,Bz_G,Bmag_G";
pub const EXPOSURE_HEADER: &str = "s_mm,t_us,x_mm,y_mm,z_mm,Bmag_G,F_N";

/// Nine significant digits in scientific notation; −0 prints as 0.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

fn mm(v: f64) -> String {
    num(v * 1e3)
}

fn gauss(v: f64) -> String {
    num(tesla_to_gauss(v))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn field_csv(profile: &FieldProfile) -> String {
    let mut out = String::from(FIELD_HEADER);
    if profile.dbz_dz.is_some() {
        out.push_str(",dBz_dz_T_per_m");
    }
    out.push('\n');
    for (i, (p, b)) in profile.positions.iter().zip(&profile.b).enumerate() {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            mm(p.x),
            mm(p.y),
            mm(p.z),
            gauss(b.x),
            gauss(b.y),
            gauss(b.z),
            gauss(b.norm())
        );
        if let Some(g) = &profile.dbz_dz {
            let _ = write!(out, ",{}", num(g[i]));
        }
        out.push('\n');
    }
    out
}

pub fn exposure_csv(profile: &ExposureProfile) -> String {
    let mut out = format!("{EXPOSURE_HEADER}\n");
    for s in &profile.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            mm(s.s),
            num(s.t * 1e6),
            mm(s.position.x),
            mm(s.position.y),
            mm(s.position.z),
            gauss(s.b.norm()),
            num(s.force.norm())
        );
    }
    out
}

fn param_column(p: Param) -> String {
    let unit = if p.is_length() { "mm" } else { "T" };
    format!("{}_{unit}", p.column())
}

fn param_value(p: Param, params: &DesignParams) -> String {
    let v = p.get(params);
    if p.is_length() {
        mm(v)
    } else {
        num(v)
    }
}

/// Sweep or descent trace, one row per evaluated candidate.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    for p in &result.params {
        let _ = write!(out, "{},", param_column(*p));
    }
    out.push_str("gradient_T_per_m,residual_G,maxBy_G,maxBz_G,feasible,reason\n");
    for c in &result.trace {
        for p in &result.params {
            let _ = write!(out, "{},", param_value(*p, &c.params));
        }
        let residual = c.residual().map(gauss).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(c.gradient),
            residual,
            gauss(c.approach.y),
            gauss(c.approach.z),
            c.feasible,
            csv_field(&c.reason)
        );
    }
    out
}

/// Ordered `key = value` block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.text(key, num(v))
    }

    pub fn length_mm(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.text(key, mm(v))
    }

    pub fn field_g(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.text(key, gauss(v))
    }

    pub fn point_mm(&mut self, key: &str, p: &Vec3) -> &mut Self {
        self.length_mm(format!("{key}_x_mm"), p.x)
            .length_mm(format!("{key}_y_mm"), p.y)
            .length_mm(format!("{key}_z_mm"), p.z)
    }

    pub fn null_report(&mut self, prefix: &str, r: &NullReport) -> &mut Self {
        self.point_mm(&format!("{prefix}position"), &r.position)
            .length_mm(format!("{prefix}distance_from_edge_mm"), r.distance_from_edge)
            .field_g(format!("{prefix}residual_Bx_G"), r.residual_b.x)
            .field_g(format!("{prefix}residual_By_G"), r.residual_b.y)
            .field_g(format!("{prefix}residual_Bz_G"), r.residual_b.z)
            .field_g(format!("{prefix}residual_mag_G"), r.residual_mag)
            .value(format!("{prefix}axial_gradient_scan_T_per_m"), r.axial_gradient)
            .text(format!("{prefix}is_effective_null"), r.is_effective_null.to_string())
    }

    pub fn extend(&mut self, other: &Summary) -> &mut Self {
        self.entries.extend(other.entries.iter().cloned());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Exact resolved design, re-readable as a design file.
pub fn design_lock(params: &DesignParams) -> CliResult<String> {
    toml::to_string(params).map_err(|e| CliError::Config(format!("cannot serialize design: {e}")))
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, content).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}
