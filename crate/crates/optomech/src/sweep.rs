//! Regime and Lyapunov maps over 1D/2D parameter grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{classify, poincare_section, DiagnosticsOptions, Regime};
use crate::error::{DiagnosticsError, ParamError};
use crate::landscape::{classify_wells, WellTopology, DEFAULT_WINDOW};
use crate::model::{ModelParams, PhaseState};

/// Sweepable fields of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Kappa,
    Delta,
    G1,
    G2,
    G3,
    Eps,
    EpsM,
    OmegaDrive,
    Gamma,
}

impl SweepParameter {
    fn apply(self, params: &mut ModelParams, value: f64) {
        match self {
            SweepParameter::Kappa => params.kappa = value,
            SweepParameter::Delta => params.delta = value,
            SweepParameter::G1 => params.g1 = value,
            SweepParameter::G2 => params.g2 = value,
            SweepParameter::G3 => params.g3 = value,
            SweepParameter::Eps => params.eps = value,
            SweepParameter::EpsM => params.eps_m = value,
            SweepParameter::OmegaDrive => params.omega_drive = value,
            SweepParameter::Gamma => params.gamma = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl SweepAxis {
    /// Node `k`, formed in one expression so grids are bit-reproducible.
    /// A single-node axis sits at `min`.
    pub fn value(&self, k: usize) -> f64 {
        if self.n == 1 {
            self.min
        } else {
            self.min + (k as f64) * (self.max - self.min) / ((self.n - 1) as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMetric {
    #[serde(rename = "lambda_max")]
    LambdaMax,
    #[serde(rename = "regime")]
    Regime,
    #[serde(rename = "well-topology")]
    WellTopology,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Number(f64),
    Regime(Regime),
    Topology(WellTopology),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub b: Option<f64>,
    pub value: Option<MetricValue>,
    pub status: CellStatus,
}

/// Row-major grid of metric values; rows follow `axis_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n_a: usize,
    pub n_b: usize,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub initial: PhaseState,
    pub axis_a: SweepAxis,
    pub axis_b: Option<SweepAxis>,
    pub metric: SweepMetric,
    pub opts: DiagnosticsOptions,
}

impl SweepSpec {
    /// Reject axes that are empty or that violate a model invariant at any
    /// grid node.
    pub fn validate(&self) -> Result<(), ParamError> {
        self.base.validate()?;
        self.opts.validate()?;
        if self.axis_a.n == 0 || self.axis_b.is_some_and(|b| b.n == 0) {
            return Err(ParamError::new("axis", "node count must be >= 1"));
        }
        let nb = self.axis_b.map_or(1, |b| b.n);
        for ia in 0..self.axis_a.n {
            for ib in 0..nb {
                self.cell_params(ia, ib)?;
            }
        }
        Ok(())
    }

    fn cell_params(&self, ia: usize, ib: usize) -> Result<ModelParams, ParamError> {
        let mut params = self.base;
        self.axis_a.param.apply(&mut params, self.axis_a.value(ia));
        if let Some(axis_b) = &self.axis_b {
            axis_b.param.apply(&mut params, axis_b.value(ib));
        }
        params.validate()?;
        Ok(params)
    }
}

/// Evaluate one grid cell in isolation. Exposed so cell independence can be
/// checked directly against [`run_sweep`].
pub fn eval_cell(spec: &SweepSpec, ia: usize, ib: usize) -> SweepCell {
    let a = spec.axis_a.value(ia);
    let b = spec.axis_b.as_ref().map(|axis| axis.value(ib));
    let params = match spec.cell_params(ia, ib) {
        Ok(p) => p,
        Err(_) => {
            return SweepCell {
                a,
                b,
                value: None,
                status: CellStatus::Failed,
            }
        }
    };
    let value = match spec.metric {
        SweepMetric::LambdaMax => crate::diagnostics::lyapunov_max(
            spec.initial,
            &params,
            &crate::diagnostics::LyapunovOptions {
                n_transient: spec.opts.transient_periods,
                n_renorm: spec.opts.lyapunov_renorms,
                renorm_interval: None,
                seed: spec.opts.lyapunov_seed,
                integrator: spec.opts.integrator,
            },
        )
        .map(|est| MetricValue::Number(est.lambda_max)),
        SweepMetric::Regime => classify(spec.initial, &params, &spec.opts)
            .map(|report| MetricValue::Regime(report.regime)),
        SweepMetric::WellTopology => Ok(MetricValue::Topology(
            classify_wells(&params, DEFAULT_WINDOW.0, DEFAULT_WINDOW.1).topology,
        )),
    };
    match value {
        Ok(v) => SweepCell {
            a,
            b,
            value: Some(v),
            status: CellStatus::Ok,
        },
        Err(_) => SweepCell {
            a,
            b,
            value: None,
            status: CellStatus::Failed,
        },
    }
}

/// Evaluate the whole grid. Cells are independent pure computations and run
/// in parallel; the merged result is ordered row-major over `(a, b)` and cell
/// failures never abort the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, ParamError> {
    spec.validate()?;
    let n_a = spec.axis_a.n;
    let n_b = spec.axis_b.map_or(1, |b| b.n);
    let cells: Vec<SweepCell> = (0..n_a * n_b)
        .into_par_iter()
        .map(|idx| eval_cell(spec, idx / n_b, idx % n_b))
        .collect();
    Ok(SweepResult { n_a, n_b, cells })
}

/// Arithmetic mean of the Poincaré x-coordinates after the transient.
pub fn mean_section_x(
    initial: PhaseState,
    params: &ModelParams,
    opts: &DiagnosticsOptions,
) -> Result<f64, DiagnosticsError> {
    let section = poincare_section(
        initial,
        params,
        opts.transient_periods,
        opts.section_points,
        &opts.integrator,
    )
    .map_err(|e| e.source)?;
    Ok(section.mean_x())
}
