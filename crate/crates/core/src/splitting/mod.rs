//! Tunneling amplitude, doublet level shifts and the splitting.
//!
//! Three routes to the splitting are provided: the closed form
//! `sqrt(eps^2 + delta^2)` with the first-order amplitude, the quadratic
//! level-shift equation that keeps the `b'` term, and a direct root solve of
//! the matching condition with the action recomputed at each trial energy.

mod quantization;
pub mod spectral;

pub use quantization::{solve_quantization, QuantizationRoots};

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::action::ActionResult;
use crate::error::{Error, Result};
use crate::potential::{DoubleWell, WellAnalysis};
use spectral::K;

/// Amplitude prefactor without the bias correction:
/// `hbar sqrt(omega_L omega_R) / sqrt(e pi) * exp(-I)`.
pub fn delta_zeroth_order(analysis: &WellAnalysis, action: f64) -> f64 {
    let a = analysis;
    a.hbar * (a.omega_left * a.omega_right).sqrt() / (E * PI).sqrt() * (-action).exp()
}

/// Relative first-order bias correction of the amplitude:
/// `(k/4) (eps / hbar omega_L) (omega_R - omega_L) / omega_R`.
pub fn first_order_correction(analysis: &WellAnalysis) -> f64 {
    let a = analysis;
    K / 4.0 * (a.eps / (a.hbar * a.omega_left)) * ((a.omega_right - a.omega_left) / a.omega_right)
}

/// Tunneling amplitude to first order in the bias over the oscillator quantum.
pub fn delta_first_order(analysis: &WellAnalysis, action: f64) -> f64 {
    delta_zeroth_order(analysis, action) * (1.0 + first_order_correction(analysis))
}

/// `sqrt(eps^2 + delta^2)`.
pub fn level_splitting(eps: f64, delta: f64) -> f64 {
    eps.hypot(delta)
}

/// Solution of the quadratic level-shift equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelShifts {
    /// Lower level relative to the mean energy.
    #[serde(rename = "dE_plus")]
    pub lower: f64,
    /// Upper level relative to the mean energy.
    #[serde(rename = "dE_minus")]
    pub upper: f64,
    pub b_prime: f64,
    pub u: f64,
    /// Amplitude from its square, without linearizing the bias correction.
    pub delta: f64,
}

impl LevelShifts {
    /// `upper - lower`, equal to `sqrt(eps^2 + delta^2 + (2 b')^2)`.
    pub fn splitting(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Level shifts including the common shift `b'` from the energy dependence
/// of the action and of the matching functions.
pub fn level_shifts(analysis: &WellAnalysis, action: &ActionResult) -> LevelShifts {
    let a = analysis;
    let (h, wl, wr) = (a.hbar, a.omega_left, a.omega_right);
    let gamow_sq = (-2.0 * action.action).exp();
    let u = 2.0 * action.slope - K * (wr + wl) / (h * wr * wl);
    let b_prime = h * h * wl * wr * gamow_sq * u / (8.0 * PI * E);
    let delta_sq = h * h * wr * wl * gamow_sq * (1.0 + K * a.eps * (wr - wl) / (2.0 * h * wr * wl)) / (E * PI);
    let delta = delta_sq.max(0.0).sqrt();
    let root = ((a.eps / 2.0).powi(2) + (delta / 2.0).powi(2) + b_prime * b_prime).sqrt();
    LevelShifts { lower: -b_prime - root, upper: -b_prime + root, b_prime, u, delta }
}

/// All three routes evaluated for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingResult {
    /// First-order amplitude.
    pub delta: f64,
    /// `sqrt(eps^2 + delta^2)`.
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    #[serde(rename = "dE_plus")]
    pub shift_lower: f64,
    #[serde(rename = "dE_minus")]
    pub shift_upper: f64,
    #[serde(rename = "E_plus")]
    pub e_lower: f64,
    #[serde(rename = "E_minus")]
    pub e_upper: f64,
    pub b_prime: f64,
    pub u: f64,
    /// Splitting from the level-shift route.
    #[serde(rename = "delta_E_shifts")]
    pub delta_e_shifts: f64,
    #[serde(rename = "I_bar")]
    pub action: f64,
    #[serde(rename = "I_slope")]
    pub slope: f64,
    #[serde(rename = "zeta_L_plus")]
    pub zeta_left_lower: f64,
    #[serde(rename = "zeta_R_plus")]
    pub zeta_right_lower: f64,
    #[serde(rename = "zeta_L_minus")]
    pub zeta_left_upper: f64,
    #[serde(rename = "zeta_R_minus")]
    pub zeta_right_upper: f64,
    /// Direct root solve; absent when a root leaves the doublet region
    /// `|zeta| <= 0.4`, as happens for shallow barriers.
    pub transcendental: Option<QuantizationRoots>,
}

impl SplittingResult {
    /// Evaluate every route. `params` supplies the bias and frequencies (it may
    /// differ from the well's own analysis when sweeping the bias formally);
    /// `action` must be evaluated at `params.mean_energy`.
    pub fn compute(well: &DoubleWell, params: &WellAnalysis, action: &ActionResult) -> Result<Self> {
        let delta = delta_first_order(params, action.action);
        let shifts = level_shifts(params, action);
        let zeta = |shift: f64| {
            (
                (shift + params.eps / 2.0) / (params.hbar * params.omega_left),
                (shift - params.eps / 2.0) / (params.hbar * params.omega_right),
            )
        };
        let (zl_lo, zr_lo) = zeta(shifts.lower);
        let (zl_up, zr_up) = zeta(shifts.upper);
        let transcendental = match solve_quantization(well, params) {
            Ok(roots) => Some(roots),
            Err(Error::RootNotBracketed { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(SplittingResult {
            delta,
            delta_e: level_splitting(params.eps, delta),
            shift_lower: shifts.lower,
            shift_upper: shifts.upper,
            e_lower: params.mean_energy + shifts.lower,
            e_upper: params.mean_energy + shifts.upper,
            b_prime: shifts.b_prime,
            u: shifts.u,
            delta_e_shifts: shifts.splitting(),
            action: action.action,
            slope: action.slope,
            zeta_left_lower: zl_lo,
            zeta_right_lower: zr_lo,
            zeta_left_upper: zl_up,
            zeta_right_upper: zr_up,
            transcendental,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{action_at, ActionTolerance};
    use crate::potential::{PhysConstants, PotentialSpec};

    fn params(wl: f64, wr: f64, tilde_eps: f64) -> WellAnalysis {
        WellAnalysis {
            left_min: -1.0,
            right_min: 1.0,
            barrier_top: 0.0,
            omega_left: wl,
            omega_right: wr,
            tilde_eps,
            eps: WellAnalysis::eps_for(tilde_eps, wl, wr, 1.0),
            mean_energy: WellAnalysis::mean_energy_for(tilde_eps, wl, wr, 1.0),
            barrier_height: 10.0,
            zero_shift: 0.0,
            mirrored: false,
            hbar: 1.0,
            mass: 1.0,
        }
    }

    #[test]
    fn equal_frequencies_drop_correction() {
        let p = params(1.7, 1.7, 0.3);
        let d = delta_first_order(&p, 6.5);
        let expected = 1.7 / (E * PI).sqrt() * (-6.5f64).exp();
        assert!(((d - expected) / expected).abs() < 1e-15);
    }

    #[test]
    fn amplitude_worked_example() {
        // hbar = 1, omega_L = 1, omega_R = 1.2, eps = 0.1, action 7, recomputed
        // step by step.
        let mut p = params(1.0, 1.2, 0.0);
        p.eps = 0.1;
        let prefactor = 1.2f64.sqrt() / (std::f64::consts::E * std::f64::consts::PI).sqrt();
        let k = 0.577_215_664_901_532_9 - std::f64::consts::LN_2;
        let bracket = 1.0 + (k / 4.0) * 0.1 * (0.2 / 1.2);
        let expected = prefactor * bracket * (-7.0f64).exp();
        let d = delta_first_order(&p, 7.0);
        assert!(((d - expected) / expected).abs() < 1e-14);
        assert!((d - 3.416_624_388_565e-4).abs() < 1e-15, "{d}");
    }

    #[test]
    fn correction_bounded_by_bias_over_quantum() {
        for &(wl, wr, te) in &[(1.0, 1.9, 0.1), (2.0, 1.1, 0.3), (1.0, 1.0, 0.2)] {
            let p = params(wl, wr, te);
            let bound = K.abs() / 4.0 * p.eps.abs() / (p.hbar * wl);
            assert!(first_order_correction(&p).abs() <= bound + 1e-17);
        }
    }

    #[test]
    fn splitting_triangle() {
        assert_eq!(level_splitting(0.0, 2.5), 2.5);
        assert_eq!(level_splitting(-1.5, 0.0), 1.5);
        assert!((level_splitting(3e-4, 4e-4) - 5e-4).abs() < 1e-19);
    }

    fn fake_action(action: f64, slope: f64) -> ActionResult {
        ActionResult { energy: 1.0, a_bar: -0.5, b_bar: 0.5, action, slope, action_left: action / 2.0, action_right: action / 2.0 }
    }

    #[test]
    fn shifts_difference_identity() {
        let p = params(1.0, 1.3, 0.02);
        let s = level_shifts(&p, &fake_action(7.0, -3.0));
        let expected = (p.eps.powi(2) + s.delta.powi(2) + (2.0 * s.b_prime).powi(2)).sqrt();
        assert!(((s.splitting() - expected) / expected).abs() < 1e-14);
        assert!(s.lower < s.upper);
    }

    #[test]
    fn shifts_without_b_prime_are_symmetric() {
        // Choose the slope that makes u vanish.
        let p = params(1.0, 1.3, 0.02);
        let slope = K * (1.3 + 1.0) / (2.0 * 1.3);
        let s = level_shifts(&p, &fake_action(7.0, slope));
        assert!(s.b_prime.abs() < 1e-30);
        let root = ((p.eps / 2.0).powi(2) + (s.delta / 2.0).powi(2)).sqrt();
        assert!((s.lower + root).abs() < 1e-18);
        assert!((s.upper - root).abs() < 1e-18);
    }

    #[test]
    fn b_prime_is_negligible_at_moderate_action() {
        let p = params(1.0, 1.2, 0.01);
        let s = level_shifts(&p, &fake_action(7.0, -4.0));
        assert!((2.0 * s.b_prime / s.delta).powi(2) < 1e-4);
    }

    #[test]
    fn routes_agree_on_symmetric_quartic() {
        let w = DoubleWell::from_spec(PotentialSpec::BiasedQuartic { alpha: 40.0, a: 1.0, beta: 0.0 }, PhysConstants::default())
            .unwrap();
        let p = *w.analysis();
        let act = action_at(&w, p.mean_energy, &ActionTolerance::default()).unwrap();
        let r = SplittingResult::compute(&w, &p, &act).unwrap();
        assert!(p.eps.abs() < 1e-10);
        assert!(((r.delta_e - r.delta) / r.delta).abs() < 1e-9);
        assert!(((r.delta_e_shifts - r.delta_e) / r.delta_e).abs() < 1e-4);
        assert!(((r.transcendental.unwrap().splitting - r.delta_e) / r.delta_e).abs() < 1e-4);
        assert!(r.e_lower < r.e_upper);
    }
}
