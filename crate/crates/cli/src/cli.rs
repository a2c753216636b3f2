use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use halbach::analysis::{
    approach_offsets, axial_gradient_at_null, extinction_distance, find_null, sample_grid, sample_line, sample_points,
    AnalysisConfig, FieldProfile, GridSpec, LineSpec,
};
use halbach::array::{build_dual_layer, DesignParams};
use halbach::ion::{path_exposure, phase_accumulation, IonSpecies, ShuttlePath, DEFAULT_PATH_PITCH};
use halbach::magnetics::gauss_to_tesla;
use halbach::optimizer::{coordinate_descent, sweep_1d};
use halbach::scene::{
    corridor_report, nine_junction_preset, sample_corridor, DEFAULT_CORRIDOR_PITCH, MIN_MODULE_PITCH,
};
use halbach::units::parse_length;

use crate::config::{
    parse_axis_plane, parse_plane, parse_polyline, parse_range, parse_scene_config, parse_span, parse_sweep_config,
    parse_vec3, read_text, resolve_design,
};
use crate::error::{CliError, CliResult};
use crate::output::{design_lock, exposure_csv, field_csv, sweep_csv, write_file, Summary};
use crate::reproduce::{descent_summary, reproduce, Target, APPROACH_START};

/// Magnetostatics of dual-layer Halbach arrays for trapped-ion field nulls.
#[derive(Debug, Parser)]
#[command(name = "halbach", version)]
pub struct Cli {
    /// Worker threads for parallel sampling (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Named design: naive_s2, rhombic_s3 or optimized_s3_1.
    #[arg(long)]
    pub preset: Option<String>,
    /// Design file; its keys override the preset.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Magnetization rotation plane: xy or yz.
    #[arg(long)]
    pub rotation_plane: Option<String>,
}

impl DesignArgs {
    fn resolve(&self) -> CliResult<DesignParams> {
        let plane = self.rotation_plane.as_deref().map(parse_plane).transpose()?;
        resolve_design(self.preset.as_deref(), self.design.as_deref(), plane)
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field at one point.
    Field {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        /// x,y,z with optional length suffixes.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Field along a straight line.
    Line {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 501)]
        samples: usize,
        /// Add a dBz/dz column.
        #[arg(long)]
        gradient: bool,
    },
    /// Field on an axis-aligned plane.
    Grid {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Plane as axis=value, e.g. y=0.5mm.
        #[arg(long)]
        plane: String,
        /// First in-plane axis (x, y, z order) as lo:hi:n.
        #[arg(long, allow_hyphen_values = true, default_value = "-3mm:3mm:61")]
        first: String,
        /// Second in-plane axis as lo:hi:n.
        #[arg(long, allow_hyphen_values = true, default_value = "0.05mm:6mm:120")]
        second: String,
    },
    /// Locate the field null on the ion line.
    Null {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Axial search window lo:hi.
        #[arg(long, default_value = "10um:10mm")]
        window: String,
    },
    /// Weak-side distance where |B| drops below a threshold.
    Extinction {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Threshold in gauss.
        #[arg(long, default_value_t = 1.0)]
        threshold_gauss: f64,
    },
    /// Field and Lorentz force along a shuttling path.
    Exposure {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Waypoints as x,y,z;x,y,z;…
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        /// Shuttling speed, m/s.
        #[arg(long, default_value_t = 1.6)]
        speed: f64,
        /// Sampling pitch along the path.
        #[arg(long, default_value = "10um")]
        pitch: String,
        /// Phase sensitivity, rad/(T·s); enables phase accumulation.
        #[arg(long)]
        sensitivity: Option<f64>,
    },
    /// One-parameter coarse/fine sweep from a config file.
    Sweep {
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        config: PathBuf,
    },
    /// Coordinate descent over the axes of a config file.
    Descent {
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        config: PathBuf,
    },
    /// Multi-module scene and corridor exposure.
    Scene {
        #[command(flatten)]
        out: OutArgs,
        /// Scene file with [[module]] and [[corridor]] tables.
        #[arg(long, conflicts_with = "nine_junction")]
        config: Option<PathBuf>,
        /// Use the 3×3 junction preset instead of a file.
        #[arg(long)]
        nine_junction: bool,
        /// Module pitch for the preset.
        #[arg(long, default_value = "20mm")]
        pitch: String,
        /// Add the optional central-arm modules.
        #[arg(long)]
        central_arms: bool,
        #[command(flatten)]
        design: DesignArgs,
        /// Corridor sampling pitch.
        #[arg(long, default_value = "50um")]
        sample_pitch: String,
        /// Flag threshold in gauss.
        #[arg(long, default_value_t = 1.0)]
        threshold_gauss: f64,
    },
    /// Regenerate reference figures and numbers with band checks.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        out: OutArgs,
        /// Design file replacing every preset design.
        #[arg(long)]
        design: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Null scan pitch.
    #[arg(long, default_value = "10um")]
    pub scan_pitch: String,
    /// Effective-null threshold in gauss.
    #[arg(long, default_value_t = 1.0)]
    pub null_threshold_gauss: f64,
    /// Finite-difference step.
    #[arg(long, default_value = "1um")]
    pub fd_step: String,
}

impl AnalysisArgs {
    fn config(&self) -> CliResult<AnalysisConfig> {
        if !(self.null_threshold_gauss > 0.0) {
            return Err(CliError::Config("null threshold must be positive".into()));
        }
        Ok(AnalysisConfig {
            scan_pitch: length(&self.scan_pitch)?,
            fd_step: length(&self.fd_step)?,
            null_threshold: gauss_to_tesla(self.null_threshold_gauss),
            ..AnalysisConfig::default()
        })
    }
}

fn length(s: &str) -> CliResult<f64> {
    parse_length(s).map_err(|e| CliError::Config(e.to_string()))
}

fn lock(dir: &Path, params: &DesignParams) -> CliResult<()> {
    write_file(dir, "design.lock", &design_lock(params)?)?;
    Ok(())
}

fn design_summary(params: &DesignParams) -> Summary {
    let mut s = Summary::new();
    s.text("rotation_plane", params.rotation_plane.name());
    s
}

/// Executes a command, writing its artifacts, and returns the summary text
/// for standard output.
pub fn run(command: &Command) -> CliResult<String> {
    match command {
        Command::Field { design, out, point } => {
            let params = design.resolve()?;
            let a = build_dual_layer(&params)?;
            let p = parse_vec3(point)?;
            let b = sample_points(&a, &[p])?;
            let csv = field_csv(&FieldProfile { positions: vec![p], b, dbz_dz: None });
            write_file(&out.out, "field.csv", &csv)?;
            lock(&out.out, &params)?;
            Ok(csv)
        }
        Command::Line { design, out, from, to, samples, gradient } => {
            let params = design.resolve()?;
            let a = build_dual_layer(&params)?;
            let spec = LineSpec::new(parse_vec3(from)?, parse_vec3(to)?, *samples)?;
            let profile = sample_line(&a, &spec, *gradient, AnalysisConfig::default().fd_step)?;
            write_file(&out.out, "line.csv", &field_csv(&profile))?;
            lock(&out.out, &params)?;
            let mut s = design_summary(&params);
            s.text("samples", profile.len().to_string());
            if let Some((m, p)) = profile.peak() {
                s.field_g("peak_Bmag_G", m).point_mm("peak", &p);
            }
            Ok(s.render())
        }
        Command::Grid { design, out, plane, first, second } => {
            let params = design.resolve()?;
            let a = build_dual_layer(&params)?;
            let (normal, offset) = parse_axis_plane(plane)?;
            let (first, n_first) = parse_range(first)?;
            let (second, n_second) = parse_range(second)?;
            let spec = GridSpec { normal, offset, first, n_first, second, n_second };
            let profile = sample_grid(&a, &spec)?;
            write_file(&out.out, "grid.csv", &field_csv(&profile))?;
            lock(&out.out, &params)?;
            let mut s = design_summary(&params);
            s.text("rows", profile.len().to_string());
            Ok(s.render())
        }
        Command::Null { design, out, analysis, window } => {
            let params = design.resolve()?;
            let cfg = analysis.config()?;
            let a = build_dual_layer(&params)?;
            let null = find_null(&a, params.ion_height, parse_span(window)?, &cfg)?;
            let gradient = axial_gradient_at_null(&a, &null, cfg.fd_step)?;
            let mut s = design_summary(&params);
            s.null_report("", &null).value("axial_gradient_T_per_m", gradient);
            if APPROACH_START > null.position.z {
                let app = approach_offsets(&a, params.ion_height, APPROACH_START, &null, cfg.approach_pitch)?;
                s.length_mm("approach_start_mm", APPROACH_START)
                    .field_g("approach_max_Bx_G", app.x)
                    .field_g("approach_max_By_G", app.y)
                    .field_g("approach_max_Bz_G", app.z);
            }
            write_file(&out.out, "null.txt", &s.render())?;
            lock(&out.out, &params)?;
            Ok(s.render())
        }
        Command::Extinction { design, out, analysis, threshold_gauss } => {
            let params = design.resolve()?;
            let cfg = analysis.config()?;
            let a = build_dual_layer(&params)?;
            let d = extinction_distance(&a, params.ion_height, gauss_to_tesla(*threshold_gauss), &cfg)?;
            let mut s = design_summary(&params);
            s.value("threshold_G", *threshold_gauss).length_mm("extinction_mm", d);
            write_file(&out.out, "extinction.txt", &s.render())?;
            lock(&out.out, &params)?;
            Ok(s.render())
        }
        Command::Exposure { design, out, path, speed, pitch, sensitivity } => {
            let params = design.resolve()?;
            let a = build_dual_layer(&params)?;
            let path = ShuttlePath::new(parse_polyline(path)?, *speed)?;
            let pitch = length(pitch)?;
            if pitch > DEFAULT_PATH_PITCH {
                return Err(CliError::Config(format!("path pitch must not exceed {DEFAULT_PATH_PITCH} m")));
            }
            let ion = IonSpecies::yb171();
            let profile = path_exposure(&a, &ion, &path, pitch)?;
            write_file(&out.out, "exposure.csv", &exposure_csv(&profile))?;
            let mut s = design_summary(&params);
            s.text("species", ion.label.clone())
                .value("speed_m_per_s", *speed)
                .length_mm("path_length_mm", path.length())
                .value("duration_us", path.duration() * 1e6)
                .field_g("max_Bmag_G", profile.max_b)
                .value("peak_force_N", profile.peak_force)
                .point_mm("peak", &profile.peak_location);
            if let Some(k) = sensitivity {
                s.value("sensitivity_rad_per_T_s", *k).value("phase_rad", phase_accumulation(&a, &path, *k, pitch)?);
            }
            write_file(&out.out, "exposure.txt", &s.render())?;
            lock(&out.out, &params)?;
            Ok(s.render())
        }
        Command::Sweep { out, config } => {
            let cfg = parse_sweep_config(&read_text(config)?)?;
            let result = sweep_1d(&cfg.base, &cfg.axes[0], &cfg.objective)?;
            write_file(&out.out, "sweep.csv", &sweep_csv(&result))?;
            lock(&out.out, &cfg.base)?;
            let s = descent_summary(&result);
            write_file(&out.out, "sweep.txt", &s.render())?;
            result.best()?;
            Ok(s.render())
        }
        Command::Descent { out, config } => {
            let cfg = parse_sweep_config(&read_text(config)?)?;
            let result = coordinate_descent(&cfg.base, &cfg.axes, cfg.rounds, &cfg.objective)?;
            write_file(&out.out, "descent.csv", &sweep_csv(&result))?;
            lock(&out.out, &cfg.base)?;
            let s = descent_summary(&result);
            write_file(&out.out, "descent.txt", &s.render())?;
            result.best()?;
            Ok(s.render())
        }
        Command::Scene { out, config, nine_junction, pitch, central_arms, design, sample_pitch, threshold_gauss } => {
            let scene = match (config, nine_junction) {
                (Some(path), _) => parse_scene_config(&read_text(path)?)?,
                (None, true) => nine_junction_preset(length(pitch)?, &design.resolve()?, *central_arms)?,
                (None, false) => return Err(CliError::Config("scene needs --config FILE or --nine-junction".into())),
            };
            let sample_pitch = length(sample_pitch)?;
            if sample_pitch > DEFAULT_CORRIDOR_PITCH {
                return Err(CliError::Config(format!("corridor pitch must not exceed {DEFAULT_CORRIDOR_PITCH} m")));
            }
            let reports = corridor_report(&scene, sample_pitch, gauss_to_tesla(*threshold_gauss))?;
            let mut s = Summary::new();
            s.text("modules", scene.placements.len().to_string())
                .text("corridors", scene.corridors.len().to_string())
                .length_mm("min_module_pitch_mm", MIN_MODULE_PITCH);
            for (i, p) in scene.placements.iter().enumerate() {
                s.text(format!("module.{i}.label"), p.label.clone())
                    .point_mm(&format!("module.{i}.translation"), &p.translation)
                    .text(format!("module.{i}.yaw_deg"), p.yaw.degrees().to_string())
                    .text(format!("module.{i}.optional"), p.optional.to_string());
            }
            for (i, r) in reports.iter().enumerate() {
                s.field_g(format!("corridor.{i}.max_Bmag_G"), r.max_b)
                    .point_mm(&format!("corridor.{i}.max"), &r.max_location)
                    .text(format!("corridor.{i}.flagged"), r.flagged.to_string())
                    .text(format!("corridor.{i}.samples"), r.samples.to_string())
                    .length_mm(format!("corridor.{i}.gate_clearance_mm"), r.gate_clearance);
                let profile = sample_corridor(&scene, i, sample_pitch)?;
                write_file(&out.out, &format!("corridor_{i}.csv"), &field_csv(&profile))?;
            }
            write_file(&out.out, "scene.txt", &s.render())?;
            Ok(s.render())
        }
        Command::Reproduce { target, out, design } => {
            let override_design = design.as_deref().map(|p| resolve_design(None, Some(p), None)).transpose()?;
            let report = reproduce(*target, override_design.as_ref());
            for (name, content) in report.files() {
                write_file(&out.out, &name, &content)?;
            }
            let text: String = report.outcomes.iter().filter(|o| o.criterion > 0).map(|o| o.line() + "\n").collect();
            if report.failures() > 0 {
                return Err(CliError::BandFailure { failed: report.failures(), total: report.banded(), lines: text });
            }
            Ok(text)
        }
    }
}
