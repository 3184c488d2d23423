//! Regime classification: chaotic by Lyapunov threshold, then periodic
//! versus quasi-periodic by the cluster structure of the Poincaré section.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::diagnostics::lyapunov::{lyapunov_max, LyapunovOptions};
use crate::diagnostics::poincare::{poincare_section, PoincareSection};
use crate::diagnostics::spectrum::{dominant_peaks, power_spectrum};
use crate::diagnostics::{reference_period, DiagnosticsOptions};
use crate::error::DiagnosticsError;
use crate::integrate::{integrate_to, sample_trajectory};
use crate::landscape::{classify_wells, WellReport, DEFAULT_WINDOW};
use crate::model::{ModelParams, PhaseState};

/// Cell size (fraction of the section bounding box) that decides whether the
/// section has collapsed onto isolated points.
const PERIODIC_CELL: f64 = 1e-3;
/// Largest number of isolated clusters still read as an m-cycle.
const PERIODIC_MAX_CLUSTERS: usize = 8;
/// Coarser cell used to count extended curve segments for reporting.
const CURVE_CELL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "periodic")]
    Periodic,
    #[serde(rename = "quasi-periodic")]
    QuasiPeriodic,
    #[serde(rename = "chaotic")]
    Chaotic,
    #[serde(rename = "undetermined")]
    Undetermined,
}

/// A spectral line relative to the strongest one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub omega: f64,
    /// Power divided by the dominant peak's power, in (0, 1].
    pub relative_power: f64,
}

/// Full classification output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub lambda_max: f64,
    pub lambda_converged: bool,
    /// Dominant spectral peaks, strongest first, at most eight.
    pub peaks: Vec<SpectralPeak>,
    /// Landscape topology over the default window.
    pub wells: WellReport,
    /// Number of extended clusters (curve segments) in the section.
    pub section_clusters: usize,
}

struct Clusters {
    count: usize,
    max_diameter: f64,
}

/// Grid-hash clustering in normalized section coordinates: points fall into
/// square cells and occupied cells touching by edge or corner merge.
fn cluster_sections(points: &[(f64, f64)], cell: f64) -> Clusters {
    assert!(!points.is_empty());
    let (mut min_x, mut max_x) = (f64::MAX, f64::MIN);
    let (mut min_p, mut max_p) = (f64::MAX, f64::MIN);
    for &(x, p) in points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_p = min_p.min(p);
        max_p = max_p.max(p);
    }
    let span_x = if max_x > min_x { max_x - min_x } else { 1.0 };
    let span_p = if max_p > min_p { max_p - min_p } else { 1.0 };

    let normalized: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, p)| ((x - min_x) / span_x, (p - min_p) / span_p))
        .collect();

    let key = |v: f64| ((v / cell).floor() as i64).min((1.0 / cell) as i64);
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &(x, p)) in normalized.iter().enumerate() {
        cells.entry((key(x), key(p))).or_default().push(i);
    }

    // Union-find over occupied cells.
    let ids: Vec<(i64, i64)> = cells.keys().copied().collect();
    let index: HashMap<(i64, i64), usize> = ids.iter().copied().zip(0..).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (ci, &(a, b)) in ids.iter().enumerate() {
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(&cj) = index.get(&(a + da, b + db)) {
                    let ra = find(&mut parent, ci);
                    let rb = find(&mut parent, cj);
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
    }

    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for (ci, id) in ids.iter().enumerate() {
        let root = find(&mut parent, ci);
        members
            .entry(root)
            .or_default()
            .extend(cells[id].iter().copied());
    }

    let mut max_diameter = 0.0f64;
    for pts in members.values() {
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                let dx = normalized[i].0 - normalized[j].0;
                let dp = normalized[i].1 - normalized[j].1;
                max_diameter = max_diameter.max(dx.hypot(dp));
            }
        }
    }
    Clusters {
        count: members.len(),
        max_diameter,
    }
}

/// Number of curve-scale clusters in a section (cell size 0.02 of the
/// bounding box).
pub fn section_cluster_count(section: &PoincareSection) -> usize {
    cluster_sections(&section.points, CURVE_CELL).count
}

/// Classify the dynamics started from `initial`.
///
/// Chaotic means the largest Lyapunov exponent exceeds `opts.lambda_chaos`;
/// otherwise the section decides: at most eight isolated point-like clusters
/// is periodic, extended structure is quasi-periodic. A non-converged
/// Lyapunov estimate yields `Undetermined`.
pub fn classify(
    initial: PhaseState,
    params: &ModelParams,
    opts: &DiagnosticsOptions,
) -> Result<RegimeReport, DiagnosticsError> {
    let wells = classify_wells(params, DEFAULT_WINDOW.0, DEFAULT_WINDOW.1);

    let lyap = lyapunov_max(
        initial,
        params,
        &LyapunovOptions {
            n_transient: opts.transient_periods,
            n_renorm: opts.lyapunov_renorms,
            renorm_interval: None,
            seed: opts.lyapunov_seed,
            integrator: opts.integrator,
        },
    )?;

    let section = poincare_section(
        initial,
        params,
        opts.transient_periods,
        opts.section_points,
        &opts.integrator,
    )
    .map_err(|e| e.source)?;

    // Spectrum of the post-transient displacement record.
    let period = reference_period(params);
    let t0 = period * opts.transient_periods as f64;
    let state0 = integrate_to(initial, 0.0, t0, params, &opts.integrator)?;
    let dt = period / opts.samples_per_period as f64;
    let n_samples = opts.spectrum_periods * opts.samples_per_period;
    let t1 = t0 + dt * (n_samples - 1) as f64;
    let traj =
        sample_trajectory(state0, t0, t1, dt, params, &opts.integrator).map_err(|e| e.source)?;
    let spectrum = power_spectrum(&traj)?;
    let raw_peaks = dominant_peaks(&spectrum, 8);
    let main_power = raw_peaks.first().map(|p| p.power).unwrap_or(0.0);
    let peaks = raw_peaks
        .iter()
        .map(|p| SpectralPeak {
            omega: p.omega,
            relative_power: if main_power > 0.0 {
                p.power / main_power
            } else {
                0.0
            },
        })
        .collect();

    let section_clusters = section_cluster_count(&section);
    // Chaos wins outright; the regular labels additionally require a settled
    // estimate and |lambda| within the threshold band.
    let regime = if lyap.lambda_max > opts.lambda_chaos {
        Regime::Chaotic
    } else if !lyap.converged || lyap.lambda_max < -opts.lambda_chaos {
        Regime::Undetermined
    } else {
        let fine = cluster_sections(&section.points, PERIODIC_CELL);
        if fine.count <= PERIODIC_MAX_CLUSTERS && fine.max_diameter < PERIODIC_CELL {
            Regime::Periodic
        } else {
            Regime::QuasiPeriodic
        }
    };

    Ok(RegimeReport {
        regime,
        lambda_max: lyap.lambda_max,
        lambda_converged: lyap.converged,
        peaks,
        wells,
        section_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_point_clusters_are_counted_exactly() {
        // Three well-separated blobs of negligible diameter.
        let mut points = Vec::new();
        for &(cx, cp) in &[(0.0, 0.0), (5.0, 5.0), (-5.0, 4.0)] {
            for k in 0..40 {
                let eps = 1e-7 * k as f64;
                points.push((cx + eps, cp - eps));
            }
        }
        let c = cluster_sections(&points, PERIODIC_CELL);
        assert_eq!(c.count, 3);
        assert!(c.max_diameter < PERIODIC_CELL);
    }

    #[test]
    fn extended_curve_is_never_read_as_periodic() {
        let points: Vec<(f64, f64)> = (0..2000)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 2000.0;
                (a.cos(), a.sin())
            })
            .collect();
        // At the fine scale the curve either stays connected or fragments
        // into many pieces; both fail the periodicity test.
        let fine = cluster_sections(&points, PERIODIC_CELL);
        assert!(fine.count > PERIODIC_MAX_CLUSTERS || fine.max_diameter >= PERIODIC_CELL);
        // At curve scale it is one connected cluster.
        let coarse = cluster_sections(&points, CURVE_CELL);
        assert_eq!(coarse.count, 1);
        assert!(coarse.max_diameter > 0.5);
    }

    #[test]
    fn single_point_section_degenerates_gracefully() {
        let c = cluster_sections(&[(2.0, -1.0)], PERIODIC_CELL);
        assert_eq!(c.count, 1);
        assert_eq!(c.max_diameter, 0.0);
    }

    #[test]
    fn undriven_oscillator_with_drive_clock_is_quasi_periodic() {
        // Zero force; the 1.8-frequency clock strobes the unit circle onto a
        // 9-cycle, which exceeds the m <= 8 periodicity cutoff.
        let mut params = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        params.omega_drive = 1.8;
        let opts = DiagnosticsOptions {
            transient_periods: 5,
            section_points: 200,
            spectrum_periods: 64,
            lyapunov_renorms: 200,
            ..DiagnosticsOptions::default()
        };
        let report = classify(PhaseState::new(1.0, 0.0), &params, &opts).unwrap();
        assert_eq!(report.regime, Regime::QuasiPeriodic);
        assert!(report.lambda_max.abs() < 0.005);
    }

    #[test]
    fn raising_the_threshold_never_creates_chaos() {
        let mut params = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        params.omega_drive = 1.8;
        let mut opts = DiagnosticsOptions {
            transient_periods: 5,
            section_points: 100,
            spectrum_periods: 64,
            lyapunov_renorms: 100,
            ..DiagnosticsOptions::default()
        };
        let base = classify(PhaseState::new(1.0, 0.0), &params, &opts).unwrap();
        opts.lambda_chaos *= 10.0;
        let raised = classify(PhaseState::new(1.0, 0.0), &params, &opts).unwrap();
        assert_ne!(base.regime, Regime::Chaotic);
        assert_ne!(raised.regime, Regime::Chaotic);
    }
}
