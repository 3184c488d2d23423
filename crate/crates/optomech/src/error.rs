//! Error types shared across the crate.

use crate::model::PhaseState;

/// A model or configuration parameter violated its constraint.
///
/// Carries the offending field name so front ends can point at the exact
/// input that failed validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid parameter `{field}`: {constraint}")]
pub struct ParamError {
    pub field: &'static str,
    pub constraint: String,
}

impl ParamError {
    pub fn new(field: &'static str, constraint: impl Into<String>) -> Self {
        Self {
            field,
            constraint: constraint.into(),
        }
    }
}

/// Failure of a single integration run.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum IntegrateError {
    /// The state stopped being finite; `last_good` is the last accepted state.
    #[error("non-finite state reached integrating past t = {t}")]
    NonFinite { t: f64, last_good: PhaseState },
    /// Step-size control underflowed, which signals stiffness or a blow-up.
    #[error("step size underflow (h = {h:.3e}) at t = {t}")]
    StepUnderflow {
        t: f64,
        h: f64,
        last_good: PhaseState,
    },
}

impl IntegrateError {
    /// Time of the last accepted state.
    pub fn time(&self) -> f64 {
        match self {
            IntegrateError::NonFinite { t, .. } => *t,
            IntegrateError::StepUnderflow { t, .. } => *t,
        }
    }

    /// Last accepted state before the failure.
    pub fn last_good(&self) -> PhaseState {
        match self {
            IntegrateError::NonFinite { last_good, .. } => *last_good,
            IntegrateError::StepUnderflow { last_good, .. } => *last_good,
        }
    }
}

/// Diagnostics-level failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Integration(#[from] IntegrateError),
    /// Too few samples to form a spectrum.
    #[error("trajectory too short for a spectrum: {len} samples, need at least {min}")]
    InputTooShort { len: usize, min: usize },
    /// Tangent-vector renormalization failed even after halving the interval.
    #[error("tangent vector under/overflowed twice; interval halving exhausted")]
    TangentBlowup,
}
