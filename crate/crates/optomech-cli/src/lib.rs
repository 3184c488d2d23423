//! Library side of the command-line front end: configuration parsing,
//! figure presets, artifact writers and the command implementations.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use optomech::error::{DiagnosticsError, IntegrateError, ParamError};

/// Process-level error carrying its exit code: 2 for configuration problems,
/// 3 for integration failures, 4 for convergence failures, 1 otherwise.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Integration(String),
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Integration(msg) => write!(f, "integration failure: {msg}"),
            CliError::Convergence(msg) => write!(f, "convergence failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        CliError::Integration(e.to_string())
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Integration(inner) => CliError::Integration(inner.to_string()),
            DiagnosticsError::TangentBlowup => CliError::Convergence(e.to_string()),
            DiagnosticsError::InputTooShort { .. } => CliError::Config(e.to_string()),
        }
    }
}
