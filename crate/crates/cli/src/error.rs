use std::fmt;

use dtn_diagnostics::DiagnosticsError;
use dtn_inference::InferenceError;
use dtn_preprocess::PreprocessError;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_AUDIT: i32 = 5;

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        Self::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<dtn_core::Error> for CliError {
    fn from(e: dtn_core::Error) -> Self {
        use dtn_core::Error as E;
        let code = match e {
            E::Config(_) => EXIT_CONFIG,
            _ => EXIT_IO,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        let code = match e {
            InferenceError::Config(_) => EXIT_CONFIG,
            InferenceError::Audit { .. } => EXIT_AUDIT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Inference(inner) => inner.into(),
            DiagnosticsError::DayOutOfRange { .. } => CliError::config(e.to_string()),
            other => CliError::new(EXIT_FAILURE, other.to_string()),
        }
    }
}

impl From<PreprocessError> for CliError {
    fn from(e: PreprocessError) -> Self {
        match e {
            PreprocessError::Core(inner) => inner.into(),
            PreprocessError::Malformed { .. } => CliError::new(EXIT_IO, e.to_string()),
            other => CliError::config(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
