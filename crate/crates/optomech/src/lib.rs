//! Classical dynamics of a modulated optomechanical resonator.
//!
//! The crate simulates a mechanical oscillator coupled to an adiabatically
//! eliminated cavity mode through linear, quadratic and cubic interactions,
//! and provides the analysis stack used to chart its route to chaos:
//!
//! * [`model`] — dimensionless parameters, radiation-pressure force,
//!   effective potential, analytic Jacobian;
//! * [`integrate`] — adaptive Dormand–Prince 5(4) stepping with exact-time
//!   sampling;
//! * [`landscape`] — critical points and well topology of the effective
//!   potential;
//! * [`diagnostics`] — Poincaré sections, power spectra, largest Lyapunov
//!   exponents, regime classification;
//! * [`sweep`] — regime / exponent maps over parameter grids.

pub mod diagnostics;
pub mod error;
pub mod integrate;
pub mod landscape;
pub mod model;
pub mod sweep;

pub use diagnostics::{
    classify, lyapunov_max, poincare_section, power_spectrum, DiagnosticsOptions, LyapunovEstimate,
    LyapunovOptions, PoincareSection, PowerSpectrum, Regime, RegimeReport,
};
pub use error::{DiagnosticsError, IntegrateError, ParamError};
pub use integrate::{integrate_to, sample_trajectory, IntegratorConfig, Trajectory};
pub use landscape::{
    classify_wells, find_critical_points, potential_profile, WellReport, WellTopology,
};
pub use model::{CouplingPolynomial, ModelParams, PhaseState};
pub use sweep::{mean_section_x, run_sweep, SweepResult, SweepSpec};
