//! Largest Lyapunov exponent by tangent-space co-integration.
//!
//! The variational system `dv/dt = J(x(t), t) v` rides along the base flow as
//! a combined four-dimensional ODE. The tangent vector is renormalized once
//! per interval and the exponent is the time average of the logarithmic
//! growth factors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::reference_period;
use crate::error::DiagnosticsError;
use crate::integrate::{abort_to_error, Driver, IntegratorConfig};
use crate::model::{ModelParams, PhaseState};

/// Controls for [`lyapunov_max`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    /// Periods discarded before accumulation starts.
    pub n_transient: usize,
    /// Number of renormalization intervals accumulated.
    pub n_renorm: usize,
    /// Renormalization interval; defaults to one drive period (one mechanical
    /// period for unmodulated runs).
    pub renorm_interval: Option<f64>,
    /// Seed of the random initial tangent direction.
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            n_transient: 100,
            n_renorm: 1800,
            renorm_interval: None,
            seed: 0,
            integrator: IntegratorConfig::default(),
        }
    }
}

/// Result of the tangent-space estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Largest Lyapunov exponent, units of `omega_m`.
    pub lambda_max: f64,
    /// Running average after each renormalization; the last entry is
    /// `lambda_max`.
    pub history: Vec<f64>,
    /// Whether the running average settled (relative spread of the last 20%
    /// of the history below 1e-2, measured against a unit-rate floor so
    /// near-zero exponents do not divide by zero).
    pub converged: bool,
}

/// Tangent norms outside this range between renormalizations trigger the
/// interval-halving restart.
const TANGENT_MIN: f64 = 1e-140;
const TANGENT_MAX: f64 = 1e140;

/// Estimate the largest Lyapunov exponent of the flow started at `initial`.
pub fn lyapunov_max(
    initial: PhaseState,
    params: &ModelParams,
    opts: &LyapunovOptions,
) -> Result<LyapunovEstimate, DiagnosticsError> {
    assert!(opts.n_renorm >= 1, "need at least one renormalization");
    let interval = opts
        .renorm_interval
        .unwrap_or_else(|| reference_period(params));
    assert!(interval > 0.0, "renormalization interval must be positive");

    match run(initial, params, opts, interval) {
        Ok(est) => Ok(est),
        Err(RunFailure::Tangent) => match run(initial, params, opts, interval / 2.0) {
            Ok(est) => Ok(est),
            Err(RunFailure::Tangent) => Err(DiagnosticsError::TangentBlowup),
            Err(RunFailure::Integration(e)) => Err(e),
        },
        Err(RunFailure::Integration(e)) => Err(e),
    }
}

enum RunFailure {
    Tangent,
    Integration(DiagnosticsError),
}

fn run(
    initial: PhaseState,
    params: &ModelParams,
    opts: &LyapunovOptions,
    interval: f64,
) -> Result<LyapunovEstimate, RunFailure> {
    // Random unit tangent direction.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let angle: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let (v0x, v0p) = (angle.cos(), angle.sin());

    let f = |t: f64, y: &[f64; 4]| {
        let state = PhaseState { x: y[0], p: y[1] };
        let d = params.rhs(state, t);
        let j = params.jacobian(state, t);
        [
            d.x,
            d.p,
            j[0][0] * y[2] + j[0][1] * y[3],
            j[1][0] * y[2] + j[1][1] * y[3],
        ]
    };

    // Step control follows the base trajectory only, so the realized orbit
    // (and the exponent) cannot depend on the tangent seed.
    let mut driver = Driver::new(&f, 0.0, [initial.x, initial.p, v0x, v0p], opts.integrator)
        .with_control_dims(2);

    let transient_end = interval * opts.n_transient as f64;
    driver.advance_to(transient_end).map_err(|kind| {
        RunFailure::Integration(
            abort_to_error(kind, driver.t(), driver.y()[0], driver.y()[1]).into(),
        )
    })?;

    let mut log_sum = 0.0;
    let mut history = Vec::with_capacity(opts.n_renorm);
    for k in 1..=opts.n_renorm {
        let t_k = interval * (opts.n_transient + k) as f64;
        driver.advance_to(t_k).map_err(|kind| {
            RunFailure::Integration(
                abort_to_error(kind, driver.t(), driver.y()[0], driver.y()[1]).into(),
            )
        })?;
        let y = *driver.y();
        let norm = y[2].hypot(y[3]);
        if !(norm.is_finite() && (TANGENT_MIN..=TANGENT_MAX).contains(&norm)) {
            return Err(RunFailure::Tangent);
        }
        log_sum += norm.ln();
        driver.set_y([y[0], y[1], y[2] / norm, y[3] / norm]);
        history.push(log_sum / (interval * k as f64));
    }

    let lambda_max = *history.last().expect("n_renorm >= 1");
    let tail_start = history.len() - (history.len() / 5).max(1);
    let tail = &history[tail_start..];
    let spread = tail.iter().copied().fold(f64::MIN, f64::max)
        - tail.iter().copied().fold(f64::MAX, f64::min);
    let converged = spread / lambda_max.abs().max(1.0) < 1e-2;

    Ok(LyapunovEstimate {
        lambda_max,
        history,
        converged,
    })
}
