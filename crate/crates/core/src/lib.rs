//! Analytic magnetostatics of dual-layer Halbach permanent-magnet arrays,
//! with null/gradient analysis, design optimization and shuttled-ion
//! exposure estimates for trapped-ion QCCD layouts.
//!
//! Frame: x is transverse (the array direction), y vertical, z axial. The
//! weak-field front edge of every design sits at z = 0 and the top faces of
//! the lower array define the base-plane y = 0. All quantities are SI;
//! gauss appear only at I/O boundaries.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod array;
pub mod error;
pub mod ion;
pub mod magnetics;
pub mod optimizer;
pub mod scene;
pub mod units;

pub use error::{Error, Result};
pub use magnetics::{Assembly, FieldSource, Magnet, Mat3, Polyhedron, Vec3};
