//! One function per CLI command; each writes its artifacts into the
//! scenario's output directory and maps failures onto exit-code classes.

use std::path::{Path, PathBuf};

use optomech::diagnostics::{
    classify, lyapunov_max, poincare_section, power_spectrum, reference_period, LyapunovOptions,
};
use optomech::integrate::sample_trajectory;
use optomech::landscape::{classify_wells, potential_profile, WellTopology, DEFAULT_WINDOW};
use optomech::sweep::{run_sweep, CellStatus, MetricValue, SweepAxis, SweepMetric, SweepSpec};
use optomech::Regime;
use serde::{Deserialize, Serialize};

use crate::config::{DiagnosticsConfig, InitialState, OutputConfig, ScenarioConfig};
use crate::output::{fmt_float, write_csv, write_json};
use crate::CliError;

fn out_path(config: &ScenarioConfig, name: &str) -> PathBuf {
    Path::new(&config.output.dir).join(name)
}

/// `potential`: tabulate the effective potential and classify its wells.
///
/// `eps_ratio` optionally overrides the drive amplitude as `eps_ratio * kappa`
/// so one preset can produce the profile family of a figure.
pub fn run_potential(
    config: &ScenarioConfig,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    eps_ratio: Option<f64>,
) -> Result<(), CliError> {
    if x_min >= x_max {
        return Err(CliError::Config(format!(
            "x-min ({x_min}) must be below x-max ({x_max})"
        )));
    }
    if n_points < 2 {
        return Err(CliError::Config("n-points must be at least 2".into()));
    }
    let mut params = config.model;
    if let Some(ratio) = eps_ratio {
        params.eps = ratio * params.kappa;
        params.validate()?;
    }
    let profile = potential_profile(&params, x_min, x_max, n_points);
    let wells = classify_wells(&params, DEFAULT_WINDOW.0, DEFAULT_WINDOW.1);

    write_csv(
        &out_path(config, "potential.csv"),
        "x,u",
        profile
            .iter()
            .map(|(x, u)| format!("{},{}", fmt_float(*x), fmt_float(*u))),
    )?;
    write_json(
        &out_path(config, "wells.json"),
        &wells,
        config.output.pretty_json,
    )?;
    Ok(())
}

/// `simulate`: uniformly sampled trajectory over a number of drive periods.
pub fn run_simulate(
    config: &ScenarioConfig,
    periods: f64,
    dt_sample: Option<f64>,
) -> Result<(), CliError> {
    if !periods.is_finite() || periods <= 0.0 {
        return Err(CliError::Config("periods must be positive".into()));
    }
    let period = reference_period(&config.model);
    let dt = match dt_sample {
        Some(dt) if dt > 0.0 => dt,
        Some(dt) => {
            return Err(CliError::Config(format!(
                "dt-sample must be positive, got {dt}"
            )))
        }
        None => period / config.diagnostics.samples_per_period as f64,
    };
    let t1 = periods * period;
    let path = out_path(config, "trajectory.csv");

    match sample_trajectory(
        config.initial.state(),
        0.0,
        t1,
        dt,
        &config.model,
        &config.integrator,
    ) {
        Ok(traj) => {
            write_csv(
                &path,
                "t,x,p",
                traj.samples.iter().enumerate().map(|(k, s)| {
                    format!(
                        "{},{},{}",
                        fmt_float(traj.time_at(k)),
                        fmt_float(s.x),
                        fmt_float(s.p)
                    )
                }),
            )?;
            Ok(())
        }
        Err(failure) => {
            // Flush what integrated cleanly, mark the file, then fail.
            let traj = &failure.partial;
            let rows: Vec<String> = traj
                .samples
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    format!(
                        "{},{},{}",
                        fmt_float(traj.time_at(k)),
                        fmt_float(s.x),
                        fmt_float(s.p)
                    )
                })
                .chain(std::iter::once(format!(
                    "# status: integration failure at t={}",
                    fmt_float(failure.source.time())
                )))
                .collect();
            write_csv(&path, "t,x,p", rows)?;
            Err(failure.source.into())
        }
    }
}

/// `poincare`: stroboscopic section at drive-period multiples.
pub fn run_poincare(config: &ScenarioConfig) -> Result<(), CliError> {
    if config.model.omega_drive <= 0.0 {
        return Err(CliError::Config("poincare requires omega_drive > 0".into()));
    }
    let path = out_path(config, "poincare.csv");
    match poincare_section(
        config.initial.state(),
        &config.model,
        config.diagnostics.transient_periods,
        config.diagnostics.section_points,
        &config.integrator,
    ) {
        Ok(section) => {
            write_csv(
                &path,
                "x,xdot",
                section
                    .points
                    .iter()
                    .map(|(x, xdot)| format!("{},{}", fmt_float(*x), fmt_float(*xdot))),
            )?;
            Ok(())
        }
        Err(failure) => {
            let rows: Vec<String> = failure
                .partial
                .points
                .iter()
                .map(|(x, xdot)| format!("{},{}", fmt_float(*x), fmt_float(*xdot)))
                .chain(std::iter::once(format!(
                    "# status: integration failure at t={}",
                    fmt_float(failure.source.time())
                )))
                .collect();
            write_csv(&path, "x,xdot", rows)?;
            Err(failure.source.into())
        }
    }
}

/// `spectrum`: one-sided displacement power spectrum after the transient.
pub fn run_spectrum(config: &ScenarioConfig) -> Result<(), CliError> {
    let params = &config.model;
    let period = reference_period(params);
    let opts = config.options();
    let t0 = period * opts.transient_periods as f64;
    let state0 = optomech::integrate::integrate_to(
        config.initial.state(),
        0.0,
        t0,
        params,
        &config.integrator,
    )?;
    let dt = period / opts.samples_per_period as f64;
    let n = opts.spectrum_periods * opts.samples_per_period;
    let t1 = t0 + dt * (n - 1) as f64;
    let traj = sample_trajectory(state0, t0, t1, dt, params, &config.integrator)
        .map_err(|e| CliError::from(e.source))?;
    let spectrum = power_spectrum(&traj)?;
    write_csv(
        &out_path(config, "spectrum.csv"),
        "omega,power",
        spectrum
            .frequencies
            .iter()
            .zip(&spectrum.power)
            .map(|(w, p)| format!("{},{}", fmt_float(*w), fmt_float(*p))),
    )
}

/// `lyapunov`: largest-exponent estimate with its convergence history.
pub fn run_lyapunov(config: &ScenarioConfig, seed: Option<u64>) -> Result<(), CliError> {
    let estimate = lyapunov_max(
        config.initial.state(),
        &config.model,
        &LyapunovOptions {
            n_transient: config.diagnostics.transient_periods,
            n_renorm: config.diagnostics.lyapunov_renorms,
            renorm_interval: None,
            seed: seed.unwrap_or(config.diagnostics.lyapunov_seed),
            integrator: config.integrator,
        },
    )?;
    write_json(
        &out_path(config, "lyapunov.json"),
        &estimate,
        config.output.pretty_json,
    )
}

/// `classify`: full regime report.
pub fn run_classify(config: &ScenarioConfig, seed: Option<u64>) -> Result<(), CliError> {
    let mut opts = config.options();
    if let Some(seed) = seed {
        opts.lyapunov_seed = seed;
    }
    let report = classify(config.initial.state(), &config.model, &opts)?;
    write_json(
        &out_path(config, "regime.json"),
        &report,
        config.output.pretty_json,
    )
}

/// On-disk sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub base: optomech::ModelParams,
    #[serde(default)]
    pub initial: InitialState,
    pub axis_a: SweepAxis,
    #[serde(default)]
    pub axis_b: Option<SweepAxis>,
    pub metric: SweepMetric,
    #[serde(default)]
    pub integrator: optomech::IntegratorConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

pub fn regime_label(regime: Regime) -> &'static str {
    match regime {
        Regime::Periodic => "periodic",
        Regime::QuasiPeriodic => "quasi-periodic",
        Regime::Chaotic => "chaotic",
        Regime::Undetermined => "undetermined",
    }
}

pub fn topology_label(topology: WellTopology) -> &'static str {
    match topology {
        WellTopology::SingleWell => "single-well",
        WellTopology::DoubleWell => "double-well",
        WellTopology::Unclassified => "unclassified",
    }
}

fn metric_label(value: &MetricValue) -> String {
    match value {
        MetricValue::Number(v) => fmt_float(*v),
        MetricValue::Regime(r) => regime_label(*r).to_string(),
        MetricValue::Topology(t) => topology_label(*t).to_string(),
    }
}

/// `sweep`: evaluate a metric over the grid and write `sweep.csv`.
pub fn run_sweep_file(
    file: &Path,
    out_override: Option<&Path>,
    fast: bool,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
    let mut sweep_config: SweepConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    if fast {
        sweep_config.diagnostics = DiagnosticsConfig {
            lyapunov_seed: sweep_config.diagnostics.lyapunov_seed,
            lambda_chaos: sweep_config.diagnostics.lambda_chaos,
            ..DiagnosticsConfig::fast()
        };
    }
    if let Some(dir) = out_override {
        sweep_config.output.dir = dir.display().to_string();
    }

    let spec = SweepSpec {
        base: sweep_config.base,
        initial: sweep_config.initial.state(),
        axis_a: sweep_config.axis_a,
        axis_b: sweep_config.axis_b,
        metric: sweep_config.metric,
        opts: sweep_config.diagnostics.to_options(sweep_config.integrator),
    };
    let result = run_sweep(&spec)?;

    let rows = result.cells.iter().map(|cell| {
        format!(
            "{},{},{},{}",
            fmt_float(cell.a),
            cell.b.map(fmt_float).unwrap_or_default(),
            cell.value.as_ref().map(metric_label).unwrap_or_default(),
            match cell.status {
                CellStatus::Ok => "ok",
                CellStatus::Failed => "failed",
            }
        )
    });
    let rows: Vec<String> = rows.collect();
    write_csv(
        &Path::new(&sweep_config.output.dir).join("sweep.csv"),
        "a,b,metric,status",
        rows,
    )
}
