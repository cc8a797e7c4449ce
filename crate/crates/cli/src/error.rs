//! Error type and process exit codes.
//!
//! Every failure is folded into one of four classes so scripts can branch
//! on the exit code alone: 1 for I/O, 2 for parse errors (bad JSON, bad
//! command line), 3 for validation errors (well-formed but physically or
//! structurally invalid input), 4 for numerical non-convergence.

use chanpure::metrics::MetricsError;
use chanpure::optics::OpticsError;
use chanpure::purify::PurifyError;
use chanpure::qcore::{QcoreError, SpecError};
use chanpure::tomography::TomographyError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Convergence(String),
}

pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Convergence(_) => EXIT_CONVERGENCE,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Json { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<QcoreError> for CliError {
    fn from(e: QcoreError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PurifyError> for CliError {
    fn from(e: PurifyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TomographyError> for CliError {
    fn from(e: TomographyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OpticsError> for CliError {
    fn from(e: OpticsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(format!(
            "not valid JSON at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    }
}
