//! Adaptive Dormand–Prince 5(4) integration of the non-autonomous flow.
//!
//! One explicit embedded pair drives everything: single raw steps, exact-time
//! integration (`integrate_to`), uniformly sampled trajectories, and the
//! tangent-space co-integration used by the Lyapunov estimator. Sample and
//! section times are hit by clamping the final step onto the target time, not
//! by dense-output interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{IntegrateError, ParamError};
use crate::model::{ModelParams, PhaseState};

/// Step size below which adaptive control reports a stiffness failure.
pub const STEP_UNDERFLOW: f64 = 1e-14;

fn default_rel_tol() -> f64 {
    1e-9
}
fn default_abs_tol() -> f64 {
    1e-11
}
fn default_initial_step() -> f64 {
    1e-3
}
fn default_max_step() -> f64 {
    0.1
}

/// Tolerances and step bounds of the adaptive controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    /// Fixed step size that disables adaptivity, for reproducibility studies.
    #[serde(default)]
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            initial_step: default_initial_step(),
            max_step: default_max_step(),
            fixed_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(ParamError::new(
                "rel_tol",
                format!("must be > 0, got {}", self.rel_tol),
            ));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(ParamError::new(
                "abs_tol",
                format!("must be > 0, got {}", self.abs_tol),
            ));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(ParamError::new(
                "initial_step",
                format!("must be > 0, got {}", self.initial_step),
            ));
        }
        if !(self.max_step >= self.initial_step && self.max_step.is_finite()) {
            return Err(ParamError::new(
                "max_step",
                format!(
                    "must satisfy max_step >= initial_step > 0, got max_step = {} with initial_step = {}",
                    self.max_step, self.initial_step
                ),
            ));
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(ParamError::new(
                    "fixed_step",
                    format!("must be > 0 when set, got {h}"),
                ));
            }
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order weights (identical to the last tableau row; FSAL pair).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One raw Dormand-Prince step; returns the 5th- and 4th-order solutions.
pub(crate) fn dp54_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y);
    for stage in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = f(t + C[stage] * h, &ys);
    }
    let mut y5 = *y;
    let mut y4 = *y;
    for (j, kj) in k.iter().enumerate() {
        for i in 0..N {
            y5[i] += h * B5[j] * kj[i];
            y4[i] += h * B4[j] * kj[i];
        }
    }
    (y5, y4)
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Abort signal from the generic driver; the caller owns the last good state.
#[derive(Debug, Clone, Copy)]
pub(crate) enum AbortKind {
    NonFinite,
    StepUnderflow { h: f64 },
}

/// Adaptive (or fixed-step) driver over an N-dimensional vector field.
///
/// Holds the running step size across `advance_to` calls so chained targets
/// reuse the adapted step. Error control accepts a step when the weighted
/// max-norm of the embedded difference is at most one, with per-component
/// weights `abs_tol + rel_tol * |y|`.
pub(crate) struct Driver<'f, F, const N: usize> {
    f: &'f F,
    t: f64,
    y: [f64; N],
    h: f64,
    cfg: IntegratorConfig,
    /// Leading components entering the error norm. Auxiliary components
    /// (e.g. a co-integrated tangent vector) ride along without steering the
    /// step size, which keeps the base trajectory independent of them.
    control_dims: usize,
}

impl<'f, F, const N: usize> Driver<'f, F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: &'f F, t0: f64, y0: [f64; N], cfg: IntegratorConfig) -> Self {
        let h = cfg.fixed_step.unwrap_or(cfg.initial_step).min(cfg.max_step);
        Self {
            f,
            t: t0,
            y: y0,
            h,
            cfg,
            control_dims: N,
        }
    }

    pub fn with_control_dims(mut self, dims: usize) -> Self {
        assert!(dims >= 1 && dims <= N);
        self.control_dims = dims;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn set_y(&mut self, y: [f64; N]) {
        self.y = y;
    }

    /// Integrate until `t` equals `t_target` exactly, clamping the last step.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), AbortKind> {
        assert!(
            t_target >= self.t,
            "t_target = {t_target} must not precede current t = {}",
            self.t
        );
        if !all_finite(&self.y) {
            return Err(AbortKind::NonFinite);
        }
        while self.t < t_target {
            let remaining = t_target - self.t;
            let h_nominal = self.cfg.fixed_step.unwrap_or(self.h);
            let clamped = h_nominal >= remaining;
            let h_try = if clamped { remaining } else { h_nominal };

            let (y5, y4) = dp54_step(self.f, self.t, &self.y, h_try);

            if self.cfg.fixed_step.is_some() {
                if !all_finite(&y5) {
                    return Err(AbortKind::NonFinite);
                }
                self.t = if clamped { t_target } else { self.t + h_try };
                self.y = y5;
                continue;
            }

            let err = if all_finite(&y5) {
                let mut e: f64 = 0.0;
                for i in 0..self.control_dims {
                    let w = self.cfg.abs_tol + self.cfg.rel_tol * self.y[i].abs().max(y5[i].abs());
                    e = e.max((y5[i] - y4[i]).abs() / w);
                }
                e
            } else {
                f64::INFINITY
            };

            if err <= 1.0 {
                self.t = if clamped { t_target } else { self.t + h_try };
                self.y = y5;
                if !clamped {
                    let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                    self.h = (h_try * factor).min(self.cfg.max_step);
                }
            } else {
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
                } else {
                    0.2
                };
                let h_new = h_try * factor;
                if h_new < STEP_UNDERFLOW {
                    return Err(AbortKind::StepUnderflow { h: h_new });
                }
                self.h = h_new;
            }
        }
        Ok(())
    }
}

fn to_array(s: PhaseState) -> [f64; 2] {
    [s.x, s.p]
}

fn to_state(y: &[f64; 2]) -> PhaseState {
    PhaseState { x: y[0], p: y[1] }
}

pub(crate) fn abort_to_error(kind: AbortKind, t: f64, x: f64, p: f64) -> IntegrateError {
    let last_good = PhaseState { x, p };
    match kind {
        AbortKind::NonFinite => IntegrateError::NonFinite { t, last_good },
        AbortKind::StepUnderflow { h } => IntegrateError::StepUnderflow { t, h, last_good },
    }
}

/// One embedded step from `(state, t)` with step `h`.
///
/// Returns the 5th-order solution and the Euclidean norm of the difference
/// between the 5th- and 4th-order solutions.
pub fn step(
    state: PhaseState,
    t: f64,
    h: f64,
    params: &ModelParams,
) -> Result<(PhaseState, f64), IntegrateError> {
    let (y5, y4) = step_embedded(state, t, h, params)?;
    let err = ((y5.x - y4.x).powi(2) + (y5.p - y4.p).powi(2)).sqrt();
    Ok((y5, err))
}

/// One embedded step exposing both the 5th- and 4th-order solutions, for
/// convergence-order studies.
pub fn step_embedded(
    state: PhaseState,
    t: f64,
    h: f64,
    params: &ModelParams,
) -> Result<(PhaseState, PhaseState), IntegrateError> {
    assert!(h > 0.0, "step size must be positive, got {h}");
    let f = |t: f64, y: &[f64; 2]| {
        let d = params.rhs(to_state(y), t);
        [d.x, d.p]
    };
    let (y5, y4) = dp54_step(&f, t, &to_array(state), h);
    if !all_finite(&y5) || !all_finite(&y4) {
        return Err(IntegrateError::NonFinite {
            t,
            last_good: state,
        });
    }
    Ok((to_state(&y5), to_state(&y4)))
}

/// Integrate from `(state, t)` to exactly `t_target`.
pub fn integrate_to(
    state: PhaseState,
    t: f64,
    t_target: f64,
    params: &ModelParams,
    config: &IntegratorConfig,
) -> Result<PhaseState, IntegrateError> {
    assert!(t_target >= t, "t_target must be >= t");
    let f = |t: f64, y: &[f64; 2]| {
        let d = params.rhs(to_state(y), t);
        [d.x, d.p]
    };
    let mut driver = Driver::new(&f, t, to_array(state), *config);
    match driver.advance_to(t_target) {
        Ok(()) => Ok(to_state(driver.y())),
        Err(kind) => Err(abort_to_error(
            kind,
            driver.t(),
            driver.y()[0],
            driver.y()[1],
        )),
    }
}

/// Uniformly sampled trajectory; the time of sample `k` is
/// `t0 + k * dt_sample`, always formed in a single multiplication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt_sample: f64,
    pub samples: Vec<PhaseState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + (k as f64) * self.dt_sample
    }

    /// Leading fraction of the trajectory (at least two samples), used for
    /// sub-interval spectra.
    pub fn head_fraction(&self, fraction: f64) -> Trajectory {
        let n = ((self.samples.len() as f64 * fraction) as usize).clamp(2, self.samples.len());
        Trajectory {
            t0: self.t0,
            dt_sample: self.dt_sample,
            samples: self.samples[..n].to_vec(),
        }
    }
}

/// Failure inside [`sample_trajectory`], carrying the samples gathered so far.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("integration failed after sample {last_sample}: {source}")]
pub struct TrajectoryError {
    #[source]
    pub source: IntegrateError,
    /// Index of the last successfully recorded sample.
    pub last_sample: usize,
    pub partial: Trajectory,
}

/// Sample the flow at `t0 + k * dt_sample` for every `k` with
/// `t0 + k * dt_sample <= t1`.
///
/// A `dt_sample` longer than the whole span degenerates to the two endpoint
/// samples (with `dt_sample` clamped to `t1 - t0`).
pub fn sample_trajectory(
    initial: PhaseState,
    t0: f64,
    t1: f64,
    dt_sample: f64,
    params: &ModelParams,
    config: &IntegratorConfig,
) -> Result<Trajectory, TrajectoryError> {
    assert!(t1 > t0, "need t1 > t0");
    assert!(dt_sample > 0.0, "need dt_sample > 0");
    let dt = if dt_sample >= t1 - t0 {
        t1 - t0
    } else {
        dt_sample
    };

    let f = |t: f64, y: &[f64; 2]| {
        let d = params.rhs(to_state(y), t);
        [d.x, d.p]
    };
    let mut driver = Driver::new(&f, t0, to_array(initial), *config);
    let mut samples = vec![initial];

    let fail = |driver: &Driver<_, 2>, kind, samples: Vec<PhaseState>| TrajectoryError {
        source: abort_to_error(kind, driver.t(), driver.y()[0], driver.y()[1]),
        last_sample: samples.len() - 1,
        partial: Trajectory {
            t0,
            dt_sample: dt,
            samples,
        },
    };

    if dt_sample >= t1 - t0 {
        // Endpoint pair; t0 + k*dt could overshoot t1 by rounding otherwise.
        if let Err(kind) = driver.advance_to(t1) {
            return Err(fail(&driver, kind, samples));
        }
        samples.push(to_state(driver.y()));
    } else {
        // Upper bound on k keeps degenerate inputs (dt far below the rounding
        // granularity of t) from looping on a stuck sample time.
        let k_max = ((t1 - t0) / dt).floor() as usize + 1;
        for k in 1..=k_max {
            let t_k = t0 + (k as f64) * dt;
            if t_k > t1 {
                break;
            }
            if let Err(kind) = driver.advance_to(t_k) {
                return Err(fail(&driver, kind, samples));
            }
            samples.push(to_state(driver.y()));
        }
    }

    Ok(Trajectory {
        t0,
        dt_sample: dt,
        samples,
    })
}
