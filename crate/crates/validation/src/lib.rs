//! Tolerances of the acceptance suite (`cargo test -p halbach-validation
//! --test acceptance`). The suite itself lives in `tests/acceptance.rs`.

/// Closed form vs adaptive quadrature, relative.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Random exterior points compared against quadrature.
pub const QUADRATURE_POINTS: usize = 1000;
/// Point-dipole agreement at 100× the magnet diameter, relative.
pub const DIPOLE_TOL: f64 = 1e-3;
pub const DIPOLE_DISTANCE_FACTOR: f64 = 100.0;
/// ∇·B and ∇×B against the Jacobian norm.
pub const MAXWELL_TOL: f64 = 1e-4;
/// Superposition and remanence scaling, relative.
pub const LINEARITY_TOL: f64 = 1e-12;
/// |B_x| on the x = 0 plane of every preset, T.
pub const MIRROR_TOL: f64 = 1e-7;
/// Accepted trapezoid error ratio when the pitch halves.
pub const PHASE_RATIO_BAND: (f64, f64) = (3.5, 4.5);
