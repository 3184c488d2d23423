//! Measurement protocol on top of the integrator: stroboscopic Poincaré
//! sections, displacement power spectra, largest-Lyapunov-exponent estimation
//! via tangent dynamics, and regime classification.

mod classify;
mod lyapunov;
mod poincare;
mod spectrum;

pub use classify::{classify, section_cluster_count, Regime, RegimeReport, SpectralPeak};
pub use lyapunov::{lyapunov_max, LyapunovEstimate, LyapunovOptions};
pub use poincare::{poincare_section, PoincareError, PoincareSection};
pub use spectrum::{dominant_peaks, power_spectrum, PowerSpectrum, MIN_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::integrate::IntegratorConfig;
use crate::model::ModelParams;

fn default_transient_periods() -> usize {
    100
}
fn default_section_points() -> usize {
    1800
}
fn default_samples_per_period() -> usize {
    64
}
fn default_spectrum_periods() -> usize {
    1024
}
fn default_lyapunov_renorms() -> usize {
    1800
}
fn default_lambda_chaos() -> f64 {
    0.01
}

/// Tuning of the measurement protocol. Durations are counted in drive
/// periods (`2*pi/omega_drive`), falling back to the mechanical period for
/// unmodulated runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsOptions {
    /// Periods discarded before any accumulation.
    #[serde(default = "default_transient_periods")]
    pub transient_periods: usize,
    /// Poincaré points retained after the transient.
    #[serde(default = "default_section_points")]
    pub section_points: usize,
    /// Spectrum sampling rate, in samples per drive period.
    #[serde(default = "default_samples_per_period")]
    pub samples_per_period: usize,
    /// Spectrum record length, in drive periods.
    #[serde(default = "default_spectrum_periods")]
    pub spectrum_periods: usize,
    /// Number of tangent renormalizations for the Lyapunov estimate.
    #[serde(default = "default_lyapunov_renorms")]
    pub lyapunov_renorms: usize,
    /// Seed for the random initial tangent direction.
    #[serde(default)]
    pub lyapunov_seed: u64,
    /// Largest-Lyapunov threshold separating chaos from regular motion.
    #[serde(default = "default_lambda_chaos")]
    pub lambda_chaos: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            transient_periods: default_transient_periods(),
            section_points: default_section_points(),
            samples_per_period: default_samples_per_period(),
            spectrum_periods: default_spectrum_periods(),
            lyapunov_renorms: default_lyapunov_renorms(),
            lyapunov_seed: 0,
            lambda_chaos: default_lambda_chaos(),
            integrator: IntegratorConfig::default(),
        }
    }
}

impl DiagnosticsOptions {
    /// Low-confidence profile for coarse sweeps: 30 transient periods and
    /// 400-point sections / renormalization runs.
    pub fn fast() -> Self {
        Self {
            transient_periods: 30,
            section_points: 400,
            spectrum_periods: 256,
            lyapunov_renorms: 400,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.section_points == 0 {
            return Err(ParamError::new("section_points", "must be >= 1"));
        }
        if self.samples_per_period == 0 {
            return Err(ParamError::new("samples_per_period", "must be >= 1"));
        }
        if self.spectrum_periods == 0 {
            return Err(ParamError::new("spectrum_periods", "must be >= 1"));
        }
        if self.lyapunov_renorms == 0 {
            return Err(ParamError::new("lyapunov_renorms", "must be >= 1"));
        }
        if !(self.lambda_chaos.is_finite() && self.lambda_chaos >= 0.0) {
            return Err(ParamError::new(
                "lambda_chaos",
                format!("must be finite and >= 0, got {}", self.lambda_chaos),
            ));
        }
        self.integrator.validate()
    }
}

/// Reference period for transients, renormalization intervals and
/// period-counted durations: the drive period when the drive is modulated,
/// the mechanical period otherwise.
pub fn reference_period(params: &ModelParams) -> f64 {
    if params.eps_m > 0.0 && params.omega_drive > 0.0 {
        std::f64::consts::TAU / params.omega_drive
    } else {
        std::f64::consts::TAU / params.omega_m
    }
}
