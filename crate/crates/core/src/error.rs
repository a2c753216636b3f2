use thiserror::Error;

use crate::magnetics::Vec3;

/// Errors raised by field evaluation, geometry construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({:.6e}, {:.6e}, {:.6e}) m is inside or within 1 nm of magnet {magnet}", point.x, point.y, point.z)]
    PointInsideOrOnMagnet { magnet: usize, point: Vec3 },

    #[error("sample {index} lies inside or on magnet {magnet}")]
    SampleInsideMagnet { index: usize, magnet: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("quadrature did not converge within {evaluations} rule evaluations")]
    QuadratureNonConvergence { evaluations: usize },

    #[error("magnets {first} and {second} overlap")]
    OverlappingMagnets { first: usize, second: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no interior field minimum in z window [{lo:.6e}, {hi:.6e}] m")]
    NoNullFound { lo: f64, hi: f64 },

    #[error("|B| never reaches the threshold on the weak side")]
    AlwaysBelowThreshold,

    #[error("no feasible candidate among {evaluated} evaluated")]
    NoFeasiblePoint { evaluated: usize },
}

impl Error {
    /// Stable machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::PointInsideOrOnMagnet { .. } | Error::SampleInsideMagnet { .. } => "PointInsideOrOnMagnet",
            Error::DegenerateGeometry(_) => "DegenerateGeometry",
            Error::QuadratureNonConvergence { .. } => "QuadratureNonConvergence",
            Error::OverlappingMagnets { .. } => "OverlappingMagnets",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NoNullFound { .. } => "NoNullFound",
            Error::AlwaysBelowThreshold => "AlwaysBelowThreshold",
            Error::NoFeasiblePoint { .. } => "NoFeasiblePoint",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
