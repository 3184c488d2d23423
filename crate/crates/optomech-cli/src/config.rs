//! Scenario configuration: one JSON document with a section per subsystem.

use std::path::Path;

use optomech::error::ParamError;
use optomech::integrate::IntegratorConfig;
use optomech::model::{ModelParams, PhaseState};
use optomech::DiagnosticsOptions;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        Self { x0: 0.0, p0: 0.0 }
    }
}

impl InitialState {
    pub fn state(&self) -> PhaseState {
        PhaseState::new(self.x0, self.p0)
    }
}

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

/// Diagnostics section of the scenario file; the integrator section is kept
/// separate and merged in when building [`DiagnosticsOptions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_transient_periods")]
    pub transient_periods: usize,
    #[serde(default = "default_section_points")]
    pub section_points: usize,
    #[serde(default = "default_samples_per_period")]
    pub samples_per_period: usize,
    #[serde(default = "default_spectrum_periods")]
    pub spectrum_periods: usize,
    #[serde(default = "default_lyapunov_renorms")]
    pub lyapunov_renorms: usize,
    #[serde(default)]
    pub lyapunov_seed: u64,
    #[serde(default = "default_lambda_chaos")]
    pub lambda_chaos: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            transient_periods: default_transient_periods(),
            section_points: default_section_points(),
            samples_per_period: default_samples_per_period(),
            spectrum_periods: default_spectrum_periods(),
            lyapunov_renorms: default_lyapunov_renorms(),
            lyapunov_seed: 0,
            lambda_chaos: default_lambda_chaos(),
        }
    }
}

impl DiagnosticsConfig {
    pub fn to_options(self, integrator: IntegratorConfig) -> DiagnosticsOptions {
        DiagnosticsOptions {
            transient_periods: self.transient_periods,
            section_points: self.section_points,
            samples_per_period: self.samples_per_period,
            spectrum_periods: self.spectrum_periods,
            lyapunov_renorms: self.lyapunov_renorms,
            lyapunov_seed: self.lyapunov_seed,
            lambda_chaos: self.lambda_chaos,
            integrator,
        }
    }

    /// Low-confidence profile for coarse sweeps.
    pub fn fast() -> Self {
        Self {
            transient_periods: 30,
            section_points: 400,
            spectrum_periods: 256,
            lyapunov_renorms: 400,
            ..Self::default()
        }
    }
}

fn default_out_dir() -> String {
    "out".to_string()
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory receiving every artifact of a command.
    #[serde(default = "default_out_dir")]
    pub dir: String,
    /// Pretty-print JSON artifacts.
    #[serde(default = "default_true")]
    pub pretty_json: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            pretty_json: true,
        }
    }
}

/// Complete description of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.model.validate()?;
        self.integrator.validate()?;
        self.diagnostics.to_options(self.integrator).validate()?;
        if !(self.initial.x0.is_finite() && self.initial.p0.is_finite()) {
            return Err(ParamError::new("initial", "x0 and p0 must be finite"));
        }
        Ok(())
    }

    pub fn options(&self) -> DiagnosticsOptions {
        self.diagnostics.to_options(self.integrator)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate().map_err(CliError::from)?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn round_trips_losslessly() {
        for name in crate::presets::PRESET_NAMES {
            let config = preset(name).unwrap();
            let json = serde_json::to_string_pretty(&config).unwrap();
            let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(config, back, "preset {name} does not round-trip");
        }
    }

    #[test]
    fn unknown_fields_are_rejected_by_name() {
        let err = serde_json::from_str::<ScenarioConfig>(
            r#"{"model": {"kappa": 50.0, "delta": -1.0, "eps": 250.0, "epz": 1.0}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("epz"), "error should name the field: {err}");
    }

    #[test]
    fn validation_names_offending_field() {
        let mut config = preset("fig2").unwrap();
        config.model.eps_m = config.model.eps * 2.0;
        let err = config.validate().unwrap_err();
        assert_eq!(err.field, "eps_m");
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let config: ScenarioConfig =
            serde_json::from_str(r#"{"model": {"kappa": 50.0, "delta": -1.0, "eps": 250.0}}"#)
                .unwrap();
        assert!(config.validate().is_ok());
        assert_eq!(config.initial, InitialState::default());
        assert_eq!(config.integrator, IntegratorConfig::default());
        assert_eq!(config.diagnostics.section_points, 1800);
        assert_eq!(config.output.dir, "out");
        assert_eq!(config.model.omega_m, 1.0);
        assert_eq!(config.model.g1, 0.0);
    }
}
