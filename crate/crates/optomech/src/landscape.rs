//! Effective-potential landscape analysis: profiles, critical points, and
//! well topology (single well versus symmetric or tilted double well).

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

/// Default scan window in zero-point units; wide enough that the harmonic
/// term dominates at both ends for every parameter set of interest.
pub const DEFAULT_WINDOW: (f64, f64) = (-100.0, 100.0);
/// Default bracketing resolution for the critical-point scan.
pub const DEFAULT_GRID_N: usize = 100_000;

/// Bisection stops once the bracket is narrower than this.
const ROOT_TOL: f64 = 1e-10;
/// Curvatures below this magnitude are reported as degenerate.
const DEGENERATE_TOL: f64 = 1e-8;
/// Step for the finite-difference curvature at a critical point.
const CURVATURE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    /// Second derivative too small to classify reliably.
    Degenerate,
}

/// Stationary point of the effective potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    /// Potential value at `x`.
    pub u: f64,
    pub kind: CriticalKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WellTopology {
    #[serde(rename = "single-well")]
    SingleWell,
    #[serde(rename = "double-well")]
    DoubleWell,
    #[serde(rename = "unclassified")]
    Unclassified,
}

/// Outcome of [`classify_wells`].
///
/// For a double well `asymmetry = U(left minimum) - U(right minimum)`, so a
/// positive value means the right well is the global minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellReport {
    pub topology: WellTopology,
    /// Minima ordered by position.
    pub minima: Vec<CriticalPoint>,
    /// Interior maximum separating a double well.
    pub barrier: Option<CriticalPoint>,
    pub asymmetry: Option<f64>,
    /// Every critical point found, kept verbatim for unclassified landscapes.
    pub critical_points: Vec<CriticalPoint>,
}

/// Tabulate `(x, U(x))` on a uniform grid inclusive of both endpoints.
pub fn potential_profile(
    params: &ModelParams,
    x_min: f64,
    x_max: f64,
    n_points: usize,
) -> Vec<(f64, f64)> {
    assert!(x_min < x_max, "need x_min < x_max");
    assert!(n_points >= 2, "need at least two points");
    let span = x_max - x_min;
    (0..n_points)
        .map(|i| {
            let x = if i == n_points - 1 {
                x_max
            } else {
                x_min + span * (i as f64) / ((n_points - 1) as f64)
            };
            (x, params.effective_potential(x))
        })
        .collect()
}

/// Scan `U'` on a grid, bracket its sign changes, and refine each root by
/// bisection. Returned points are ordered by position; the kind comes from a
/// central-difference curvature.
pub fn find_critical_points(
    params: &ModelParams,
    x_min: f64,
    x_max: f64,
    grid_n: usize,
) -> Vec<CriticalPoint> {
    assert!(x_min < x_max, "need x_min < x_max");
    assert!(grid_n >= 100, "need grid_n >= 100 for bracketing");
    let grad = |x: f64| params.effective_potential_gradient(x);
    let span = x_max - x_min;
    let node = |i: usize| x_min + span * (i as f64) / ((grid_n - 1) as f64);

    let mut roots: Vec<f64> = Vec::new();
    let mut prev_x = node(0);
    let mut prev_g = grad(prev_x);
    for i in 1..grid_n {
        let x = node(i);
        let g = grad(x);
        if prev_g == 0.0 {
            roots.push(prev_x);
        } else if prev_g * g < 0.0 {
            roots.push(bisect(&grad, prev_x, x, prev_g));
        }
        prev_x = x;
        prev_g = g;
    }
    if prev_g == 0.0 {
        roots.push(prev_x);
    }

    roots
        .into_iter()
        .map(|x| {
            let curvature =
                (grad(x + CURVATURE_STEP) - grad(x - CURVATURE_STEP)) / (2.0 * CURVATURE_STEP);
            let kind = if curvature.abs() < DEGENERATE_TOL {
                CriticalKind::Degenerate
            } else if curvature > 0.0 {
                CriticalKind::Minimum
            } else {
                CriticalKind::Maximum
            };
            CriticalPoint {
                x,
                u: params.effective_potential(x),
                kind,
            }
        })
        .collect()
}

fn bisect(grad: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let g_mid = grad(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Classify the landscape inside a window, widening it (up to four times the
/// requested half-width) until the gradient confines the dynamics at both
/// ends.
pub fn classify_wells(params: &ModelParams, x_min: f64, x_max: f64) -> WellReport {
    assert!(x_min < x_max, "need x_min < x_max");
    let mut lo = x_min;
    let mut hi = x_max;
    for _ in 0..3 {
        let confining = params.effective_potential_gradient(lo) < 0.0
            && params.effective_potential_gradient(hi) > 0.0;
        if confining {
            break;
        }
        lo *= 2.0;
        hi *= 2.0;
    }
    let critical_points = find_critical_points(params, lo, hi, DEFAULT_GRID_N);
    classify_from_critical_points(critical_points)
}

fn classify_from_critical_points(critical_points: Vec<CriticalPoint>) -> WellReport {
    let minima: Vec<CriticalPoint> = critical_points
        .iter()
        .copied()
        .filter(|c| c.kind == CriticalKind::Minimum)
        .collect();
    let maxima: Vec<CriticalPoint> = critical_points
        .iter()
        .copied()
        .filter(|c| c.kind == CriticalKind::Maximum)
        .collect();
    let degenerate = critical_points
        .iter()
        .any(|c| c.kind == CriticalKind::Degenerate);

    let unclassified = WellReport {
        topology: WellTopology::Unclassified,
        minima: minima.clone(),
        barrier: None,
        asymmetry: None,
        critical_points: critical_points.clone(),
    };

    if critical_points.len() > 3 || degenerate {
        return unclassified;
    }
    match (minima.len(), maxima.len()) {
        (1, 0) => WellReport {
            topology: WellTopology::SingleWell,
            minima,
            barrier: None,
            asymmetry: None,
            critical_points,
        },
        (2, 1) => {
            let barrier = maxima[0];
            if barrier.x <= minima[0].x || barrier.x >= minima[1].x {
                return unclassified;
            }
            let asymmetry = minima[0].u - minima[1].u;
            WellReport {
                topology: WellTopology::DoubleWell,
                minima,
                barrier: Some(barrier),
                asymmetry: Some(asymmetry),
                critical_points,
            }
        }
        _ => unclassified,
    }
}
