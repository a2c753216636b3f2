use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced to the command line, each with a stable category and
/// exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Domain(#[from] halbach::Error),

    /// `lines` holds the per-criterion verdicts for standard output.
    #[error("{failed} of {total} reproduction criteria outside their bands")]
    BandFailure { failed: usize, total: usize, lines: String },
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigParse",
            CliError::Io { .. } => "FileIO",
            CliError::Domain(e) => e.category(),
            CliError::BandFailure { .. } => "BandFailure",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Domain(_) => 3,
            CliError::BandFailure { .. } => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
