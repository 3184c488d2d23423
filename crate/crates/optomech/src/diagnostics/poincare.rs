//! Stroboscopic Poincaré sections at drive-period multiples.

use serde::{Deserialize, Serialize};

use crate::error::IntegrateError;
use crate::integrate::{abort_to_error, Driver, IntegratorConfig};
use crate::model::{ModelParams, PhaseState};

/// Section samples `(x, xdot)` recorded at `t_j = (2*pi/omega_drive) * j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub points: Vec<(f64, f64)>,
    /// First retained stroboscopic index (transient periods are skipped).
    pub j_start: usize,
    /// Number of retained points.
    pub count: usize,
}

impl PoincareSection {
    pub fn mean_x(&self) -> f64 {
        if self.points.is_empty() {
            return f64::NAN;
        }
        self.points.iter().map(|(x, _)| x).sum::<f64>() / self.points.len() as f64
    }
}

/// Integration failure inside a section run, carrying the partial section.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("section integration failed after {} points: {source}", partial.count)]
pub struct PoincareError {
    #[source]
    pub source: IntegrateError,
    pub partial: PoincareSection,
}

/// Record `(x, xdot)` at every stroboscopic time
/// `t_j = (2*pi/omega_drive) * j` for `j = n_transient + 1 ..= n_transient + n_points`.
///
/// Every section time is reached by clamped integration, never interpolation.
pub fn poincare_section(
    initial: PhaseState,
    params: &ModelParams,
    n_transient: usize,
    n_points: usize,
    config: &IntegratorConfig,
) -> Result<PoincareSection, PoincareError> {
    assert!(
        params.omega_drive > 0.0,
        "poincare_section requires omega_drive > 0"
    );
    assert!(n_points >= 1, "need at least one section point");
    let period = std::f64::consts::TAU / params.omega_drive;
    let j_start = n_transient + 1;

    let f = |t: f64, y: &[f64; 2]| {
        let d = params.rhs(PhaseState { x: y[0], p: y[1] }, t);
        [d.x, d.p]
    };
    let mut driver = Driver::new(&f, 0.0, [initial.x, initial.p], *config);
    let mut points = Vec::with_capacity(n_points);
    for j in j_start..j_start + n_points {
        let t_j = period * (j as f64);
        if let Err(kind) = driver.advance_to(t_j) {
            let count = points.len();
            return Err(PoincareError {
                source: abort_to_error(kind, driver.t(), driver.y()[0], driver.y()[1]),
                partial: PoincareSection {
                    points,
                    j_start,
                    count,
                },
            });
        }
        points.push((driver.y()[0], driver.y()[1]));
    }
    Ok(PoincareSection {
        count: points.len(),
        points,
        j_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate_to;

    fn harmonic_with_drive_clock() -> ModelParams {
        // Unused force; omega_drive only defines the section clock.
        let mut p = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        p.omega_drive = 1.8;
        p
    }

    #[test]
    fn conservative_harmonic_points_stay_on_circle() {
        let params = harmonic_with_drive_clock();
        let section = poincare_section(
            PhaseState::new(1.0, 0.0),
            &params,
            0,
            200,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(section.count, 200);
        assert_eq!(section.j_start, 1);
        for (x, xdot) in &section.points {
            let r = x * x + xdot * xdot;
            assert!((r - 1.0).abs() < 1e-6, "left the unit circle: r^2 = {r}");
        }
    }

    #[test]
    fn one_pass_section_matches_chained_integrate_to() {
        // Same section built from independent exact-time segments; the two
        // paths may adapt steps differently but must agree far inside the
        // integration tolerance on a regular orbit.
        let params =
            ModelParams::new(50.0, -1.0, 0.15, 0.0, 0.0, 250.0, 0.20007 * 250.0, 1.8, 0.0).unwrap();
        let cfg = IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..IntegratorConfig::default()
        };
        let n_transient = 5;
        let n_points = 20;
        let one_pass = poincare_section(
            PhaseState::new(0.0, 0.0),
            &params,
            n_transient,
            n_points,
            &cfg,
        )
        .unwrap();

        let period = std::f64::consts::TAU / params.omega_drive;
        let mut chained = Vec::new();
        let mut state = PhaseState::new(0.0, 0.0);
        let mut t = 0.0;
        for j in (n_transient + 1)..(n_transient + 1 + n_points) {
            let t_j = period * (j as f64);
            state = integrate_to(state, t, t_j, &params, &cfg).unwrap();
            t = t_j;
            chained.push((state.x, state.p));
        }
        for (a, b) in one_pass.points.iter().zip(&chained) {
            assert!(
                (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9,
                "one-pass {a:?} vs chained {b:?}"
            );
        }
    }
}
