//! Dimensionless model of a driven mechanical resonator coupled to an
//! adiabatically eliminated cavity field.
//!
//! Units: the mechanical frequency sets the time scale (`omega_m = 1`), the
//! displacement is measured in zero-point lengths, and every rate (`kappa`,
//! `delta`, `eps`, ...) is expressed in units of `omega_m`. The coupling
//! constants are the zero-point-rescaled ones, so the cavity frequency shift
//! is the plain polynomial `f(x) = g1*x + g2*x^2 + g3*x^3`.
//!
//! The equation of motion is
//!
//! ```text
//! dx/dt = p
//! dp/dt = -omega_m^2 x + P(t) f'(x) / [(delta - f(x))^2 + kappa^2/4] - (gamma/2) p
//! ```
//!
//! with instantaneous drive power `P(t) = eps^2 - eps_m^2 sin(omega_drive t)`.
//! For the unmodulated system the force derives from the effective potential
//! `U(x) = omega_m^2 x^2/2 + (2 eps^2/kappa) atan[(delta - f(x)) / (kappa/2)]`.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Instantaneous phase-space point of the resonator. With unit mass the
/// momentum equals the velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub p: f64,
}

impl PhaseState {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    /// NaN or infinity in either component marks an integration failure,
    /// never a valid state.
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }
}

/// Cavity frequency shift polynomial `f(x) = g1 x + g2 x^2 + g3 x^3` and its
/// first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPolynomial {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl CouplingPolynomial {
    /// `f(x)`, evaluated in Horner form; `f(0) = 0` exactly.
    pub fn eval(&self, x: f64) -> f64 {
        x * (self.g1 + x * (self.g2 + x * self.g3))
    }

    /// `f'(x) = g1 + 2 g2 x + 3 g3 x^2`.
    pub fn deriv(&self, x: f64) -> f64 {
        self.g1 + x * (2.0 * self.g2 + x * 3.0 * self.g3)
    }

    /// `f''(x) = 2 g2 + 6 g3 x`.
    pub fn second_deriv(&self, x: f64) -> f64 {
        2.0 * self.g2 + 6.0 * self.g3 * x
    }
}

fn default_omega_m() -> f64 {
    1.0
}

/// All constants of the equation of motion, in units of `omega_m`.
///
/// Construct with [`ModelParams::new`] or validate a hand-built value with
/// [`ModelParams::validate`]; every operation assumes a validated value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Cavity decay rate, > 0.
    pub kappa: f64,
    /// Mechanical frequency; pinned to 1 by the unit convention.
    #[serde(default = "default_omega_m")]
    pub omega_m: f64,
    /// Detuning of the cavity above the drive.
    pub delta: f64,
    /// Linear coupling strength.
    #[serde(default)]
    pub g1: f64,
    /// Quadratic coupling strength.
    #[serde(default)]
    pub g2: f64,
    /// Cubic coupling strength.
    #[serde(default)]
    pub g3: f64,
    /// Drive amplitude, >= 0.
    pub eps: f64,
    /// Modulation amplitude, 0 <= eps_m <= eps.
    #[serde(default)]
    pub eps_m: f64,
    /// Modulation frequency, > 0 whenever eps_m > 0.
    #[serde(default)]
    pub omega_drive: f64,
    /// Mechanical damping rate, >= 0.
    #[serde(default)]
    pub gamma: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kappa: f64,
        delta: f64,
        g1: f64,
        g2: f64,
        g3: f64,
        eps: f64,
        eps_m: f64,
        omega_drive: f64,
        gamma: f64,
    ) -> Result<Self, ParamError> {
        let params = Self {
            kappa,
            omega_m: 1.0,
            delta,
            g1,
            g2,
            g3,
            eps,
            eps_m,
            omega_drive,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    /// Fail-fast validation of every invariant.
    pub fn validate(&self) -> Result<(), ParamError> {
        for (field, v) in [
            ("kappa", self.kappa),
            ("omega_m", self.omega_m),
            ("delta", self.delta),
            ("g1", self.g1),
            ("g2", self.g2),
            ("g3", self.g3),
            ("eps", self.eps),
            ("eps_m", self.eps_m),
            ("omega_drive", self.omega_drive),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(ParamError::new(field, format!("must be finite, got {v}")));
            }
        }
        if self.kappa <= 0.0 {
            return Err(ParamError::new(
                "kappa",
                format!("must be > 0, got {}", self.kappa),
            ));
        }
        if self.omega_m != 1.0 {
            return Err(ParamError::new(
                "omega_m",
                format!("fixed to 1 by the unit convention, got {}", self.omega_m),
            ));
        }
        if self.eps < 0.0 {
            return Err(ParamError::new(
                "eps",
                format!("must be >= 0, got {}", self.eps),
            ));
        }
        if self.eps_m < 0.0 || self.eps_m > self.eps {
            return Err(ParamError::new(
                "eps_m",
                format!(
                    "must satisfy 0 <= eps_m <= eps, got eps_m = {} with eps = {}",
                    self.eps_m, self.eps
                ),
            ));
        }
        if self.eps_m > 0.0 && self.omega_drive <= 0.0 {
            return Err(ParamError::new(
                "omega_drive",
                format!("must be > 0 when eps_m > 0, got {}", self.omega_drive),
            ));
        }
        if self.omega_drive < 0.0 {
            return Err(ParamError::new(
                "omega_drive",
                format!("must be >= 0, got {}", self.omega_drive),
            ));
        }
        if self.gamma < 0.0 {
            return Err(ParamError::new(
                "gamma",
                format!("must be >= 0, got {}", self.gamma),
            ));
        }
        Ok(())
    }

    /// View of the coupling polynomial.
    pub fn coupling(&self) -> CouplingPolynomial {
        CouplingPolynomial {
            g1: self.g1,
            g2: self.g2,
            g3: self.g3,
        }
    }

    /// Instantaneous squared drive amplitude `P(t) = eps^2 - eps_m^2 sin(omega_drive t)`.
    ///
    /// Nonnegative for all `t` because validation enforces `eps_m <= eps`.
    pub fn drive_power(&self, t: f64) -> f64 {
        self.eps * self.eps - self.eps_m * self.eps_m * (self.omega_drive * t).sin()
    }

    /// Lorentzian denominator `(delta - f(x))^2 + kappa^2/4`, bounded below by
    /// `kappa^2/4 > 0`.
    fn denom(&self, fx: f64) -> f64 {
        let d = self.delta - fx;
        d * d + self.kappa * self.kappa / 4.0
    }

    /// Radiation-pressure force `P(t) f'(x) / [(delta - f(x))^2 + kappa^2/4]`.
    pub fn radiation_force(&self, x: f64, t: f64) -> f64 {
        let c = self.coupling();
        self.drive_power(t) * c.deriv(x) / self.denom(c.eval(x))
    }

    /// Radiation-pressure force of the unmodulated drive (`P = eps^2`), the
    /// one that derives from [`ModelParams::effective_potential`].
    pub fn static_radiation_force(&self, x: f64) -> f64 {
        let c = self.coupling();
        self.eps * self.eps * c.deriv(x) / self.denom(c.eval(x))
    }

    /// Right-hand side of the equation of motion.
    pub fn rhs(&self, state: PhaseState, t: f64) -> PhaseState {
        PhaseState {
            x: state.p,
            p: -self.omega_m * self.omega_m * state.x + self.radiation_force(state.x, t)
                - 0.5 * self.gamma * state.p,
        }
    }

    /// Analytic Jacobian of the right-hand side with respect to `(x, p)`,
    /// row-major: `[[d xdot/dx, d xdot/dp], [d pdot/dx, d pdot/dp]]`.
    ///
    /// Used to co-integrate the tangent dynamics for Lyapunov estimates.
    pub fn jacobian(&self, state: PhaseState, t: f64) -> [[f64; 2]; 2] {
        let c = self.coupling();
        let fx = c.eval(state.x);
        let fp = c.deriv(state.x);
        let fpp = c.second_deriv(state.x);
        let d = self.denom(fx);
        let dforce_dx =
            self.drive_power(t) * (fpp * d + 2.0 * fp * fp * (self.delta - fx)) / (d * d);
        [
            [0.0, 1.0],
            [-self.omega_m * self.omega_m + dforce_dx, -0.5 * self.gamma],
        ]
    }

    /// Effective potential of the unmodulated system,
    /// `U(x) = omega_m^2 x^2/2 + (2 eps^2/kappa) atan[(delta - f(x))/(kappa/2)]`.
    pub fn effective_potential(&self, x: f64) -> f64 {
        let fx = self.coupling().eval(x);
        0.5 * self.omega_m * self.omega_m * x * x
            + (2.0 * self.eps * self.eps / self.kappa)
                * ((self.delta - fx) / (self.kappa / 2.0)).atan()
    }

    /// `U'(x) = omega_m^2 x - static_radiation_force(x)`; the landscape module
    /// locates its roots.
    pub fn effective_potential_gradient(&self, x: f64) -> f64 {
        self.omega_m * self.omega_m * x - self.static_radiation_force(x)
    }

    /// Mechanical energy `p^2/2 + U(x)`. A first integral only for the
    /// autonomous system (`gamma = 0`, `eps_m = 0`); computable always.
    pub fn energy(&self, state: PhaseState) -> f64 {
        0.5 * state.p * state.p + self.effective_potential(state.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig_params(g1: f64, g2: f64, g3: f64, eps_m_ratio: f64) -> ModelParams {
        let kappa = 50.0;
        let eps = 5.0 * kappa;
        ModelParams::new(kappa, -1.0, g1, g2, g3, eps, eps_m_ratio * eps, 1.8, 0.0).unwrap()
    }

    #[test]
    fn coupling_has_no_constant_term() {
        let c = CouplingPolynomial {
            g1: 0.3,
            g2: -2.0,
            g3: 7.5,
        };
        assert_eq!(c.eval(0.0), 0.0);
    }

    #[test]
    fn coupling_matches_hand_arithmetic() {
        // 0.15*2 + 0.0075*4 = 0.33
        let c = CouplingPolynomial {
            g1: 0.15,
            g2: 0.0075,
            g3: 0.0,
        };
        assert_relative_eq!(c.eval(2.0), 0.33, max_relative = 1e-15);
    }

    #[test]
    fn even_coupling_is_even() {
        let c = CouplingPolynomial {
            g1: 0.0,
            g2: 0.0075,
            g3: 0.0,
        };
        for x in [0.5, 1.0, 3.0] {
            assert_eq!(c.eval(x), c.eval(-x));
        }
    }

    #[test]
    fn coupling_without_quadratic_term_is_odd() {
        let c = CouplingPolynomial {
            g1: 0.15,
            g2: 0.0,
            g3: -0.00025,
        };
        for x in [0.5, 1.0, 3.0, 47.0] {
            assert_eq!(c.eval(x), -c.eval(-x));
        }
    }

    #[test]
    fn coupling_derivatives() {
        let c = CouplingPolynomial {
            g1: 0.15,
            g2: 0.0075,
            g3: -0.00025,
        };
        let x = 1.7;
        assert_relative_eq!(
            c.deriv(x),
            0.15 + 2.0 * 0.0075 * x + 3.0 * (-0.00025) * x * x,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            c.second_deriv(x),
            2.0 * 0.0075 + 6.0 * (-0.00025) * x,
            max_relative = 1e-15
        );
    }

    #[test]
    fn drive_power_without_modulation_is_constant() {
        let p = fig_params(0.15, 0.0, 0.0, 0.0);
        for t in [0.0, 0.37, 12.0, 4000.0] {
            assert_eq!(p.drive_power(t), 250.0 * 250.0);
        }
    }

    #[test]
    fn drive_power_at_time_zero_is_eps_squared() {
        let p = fig_params(0.15, 0.0, 0.0, 0.20007);
        assert_eq!(p.drive_power(0.0), 250.0 * 250.0);
    }

    #[test]
    fn drive_power_at_quarter_period() {
        // Hand evaluation: 62500 * (1 - 0.20007^2) = 59998.24969375.
        let p = fig_params(0.15, 0.0, 0.0, 0.20007);
        let t = std::f64::consts::FRAC_PI_2 / p.omega_drive;
        assert_relative_eq!(p.drive_power(t), 59998.24969375, max_relative = 1e-12);
    }

    #[test]
    fn drive_power_stays_nonnegative() {
        let p = fig_params(0.15, 0.0075, 0.0, 1.0);
        let floor = p.eps * p.eps - p.eps_m * p.eps_m;
        for k in 0..2000 {
            let t = 0.013 * k as f64;
            assert!(p.drive_power(t) >= floor - 1e-9);
        }
    }

    #[test]
    fn force_vanishes_without_coupling() {
        let p = fig_params(0.0, 0.0, 0.0, 0.20007);
        for x in [-30.0, 0.0, 4.5, 80.0] {
            assert_eq!(p.radiation_force(x, 0.3), 0.0);
        }
    }

    #[test]
    fn force_at_origin_matches_manual_arithmetic() {
        // 62500 * 0.15 / (1 + 625) = 9375/626.
        let p = fig_params(0.15, 0.0075, 0.0, 0.0);
        assert_relative_eq!(
            p.radiation_force(0.0, 0.0),
            9375.0 / 626.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn force_is_minus_potential_gradient_plus_harmonic() {
        // Unmodulated force must equal -dU/dx + omega_m^2 x; checked by central
        // differences on U itself.
        let p = fig_params(0.15, 0.0075, -0.00025, 0.0);
        let h = 1e-6;
        for k in 0..100 {
            let x = -50.0 + k as f64 + 0.37;
            let fd = -(p.effective_potential(x + h) - p.effective_potential(x - h)) / (2.0 * h);
            let force = p.radiation_force(x, 0.0) - p.omega_m * p.omega_m * x;
            let scale = force.abs().max(fd.abs()).max(1.0);
            assert!(
                (force - fd).abs() / scale < 1e-6,
                "x = {x}: analytic {force}, finite difference {fd}"
            );
        }
    }

    #[test]
    fn rhs_fixed_point_at_origin_without_drive() {
        let p = ModelParams::new(50.0, -1.0, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let d = p.rhs(PhaseState::new(0.0, 0.0), 0.0);
        assert_eq!(d, PhaseState::new(0.0, 0.0));
    }

    #[test]
    fn rhs_reduces_to_harmonic_oscillator() {
        let p = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 250.0, 0.0, 0.0, 0.0).unwrap();
        let d = p.rhs(PhaseState::new(1.0, 0.0), 0.0);
        assert_eq!(d, PhaseState::new(0.0, -1.0));
    }

    #[test]
    fn rhs_composes_force_at_origin() {
        let p = fig_params(0.15, 0.0, 0.0, 0.20007);
        let d = p.rhs(PhaseState::new(0.0, 0.0), 0.0);
        assert_eq!(d.x, 0.0);
        assert_relative_eq!(d.p, 9375.0 / 626.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobian_harmonic_limit() {
        let p = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let j = p.jacobian(PhaseState::new(0.3, -0.8), 1.2);
        assert_eq!(j, [[0.0, 1.0], [-1.0, 0.0]]);
    }

    #[test]
    fn jacobian_damping_enters_only_momentum_diagonal() {
        let p = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2).unwrap();
        let j = p.jacobian(PhaseState::new(0.0, 0.0), 0.0);
        assert_eq!(j, [[0.0, 1.0], [-1.0, -0.1]]);
    }

    fn finite_difference_jacobian(p: &ModelParams, s: PhaseState, t: f64) -> [[f64; 2]; 2] {
        let h = 1e-6;
        let fx_p = p.rhs(PhaseState::new(s.x + h, s.p), t);
        let fx_m = p.rhs(PhaseState::new(s.x - h, s.p), t);
        let fp_p = p.rhs(PhaseState::new(s.x, s.p + h), t);
        let fp_m = p.rhs(PhaseState::new(s.x, s.p - h), t);
        [
            [(fx_p.x - fx_m.x) / (2.0 * h), (fp_p.x - fp_m.x) / (2.0 * h)],
            [(fx_p.p - fx_m.p) / (2.0 * h), (fp_p.p - fp_m.p) / (2.0 * h)],
        ]
    }

    #[test]
    fn jacobian_matches_finite_differences_fig4() {
        let p = fig_params(0.15, 0.0075, 0.0, 0.20007);
        let j = p.jacobian(PhaseState::new(1.0, 0.0), 0.0);
        let fd = finite_difference_jacobian(&p, PhaseState::new(1.0, 0.0), 0.0);
        for r in 0..2 {
            for c in 0..2 {
                let scale = j[r][c].abs().max(fd[r][c].abs()).max(1.0);
                assert!(
                    (j[r][c] - fd[r][c]).abs() / scale < 1e-6,
                    "entry ({r},{c}): analytic {} vs fd {}",
                    j[r][c],
                    fd[r][c]
                );
            }
        }
    }

    #[test]
    fn potential_is_harmonic_without_drive() {
        let p = ModelParams::new(50.0, -1.0, 0.15, 0.0075, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            assert_abs_diff_eq!(p.effective_potential(x), 0.5 * x * x, epsilon = 1e-15);
        }
    }

    #[test]
    fn potential_even_for_even_coupling() {
        let p = fig_params(0.0, 0.0075, 0.0, 0.0);
        for x in [0.3, 5.0, 17.0, 60.0] {
            assert_eq!(p.effective_potential(x), p.effective_potential(-x));
        }
    }

    #[test]
    fn potential_has_two_minima_for_negative_cubic() {
        // Brute-force oracle: count strict local minima of U on a dense grid.
        let p = fig_params(0.15, 0.0075, -0.00025, 0.0);
        let n = 40_001;
        let (lo, hi) = (-100.0, 100.0);
        let us: Vec<f64> = (0..n)
            .map(|i| p.effective_potential(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect();
        let minima = us.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count();
        assert_eq!(minima, 2);
    }

    #[test]
    fn potential_arctan_term_is_bounded() {
        let p = fig_params(0.15, 0.0075, 0.00025, 0.0);
        let bound = (2.0 * p.eps * p.eps / p.kappa) * std::f64::consts::FRAC_PI_2;
        for k in 0..400 {
            let x = -200.0 + k as f64;
            let excess = p.effective_potential(x) - 0.5 * x * x;
            assert!(excess.abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn energy_trivial_values() {
        let p = ModelParams::new(50.0, -1.0, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(p.energy(PhaseState::new(0.0, 0.0)), 0.0);
        assert_abs_diff_eq!(p.energy(PhaseState::new(1.0, 0.0)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert_eq!(
            ModelParams::new(0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0)
                .unwrap_err()
                .field,
            "kappa"
        );
        assert_eq!(
            ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.8, 0.0)
                .unwrap_err()
                .field,
            "eps_m"
        );
        assert_eq!(
            ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0)
                .unwrap_err()
                .field,
            "omega_drive"
        );
        assert_eq!(
            ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0)
                .unwrap_err()
                .field,
            "eps"
        );
        assert_eq!(
            ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -0.1)
                .unwrap_err()
                .field,
            "gamma"
        );
        let mut p = ModelParams::new(50.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        p.omega_m = 2.0;
        assert_eq!(p.validate().unwrap_err().field, "omega_m");
        p.omega_m = f64::NAN;
        assert_eq!(p.validate().unwrap_err().field, "omega_m");
    }
}
