//! Barrier actions: turning points, the Gamow integral and its energy slope,
//! the two-parabola closed forms and the small-energy expansion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, QuadTolerance};
use crate::numerics::roots::safe_newton;
use crate::potential::{DoubleWell, PhysConstants, Side};

/// Barrier action at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionResult {
    #[serde(rename = "E")]
    pub energy: f64,
    /// Inner turning point of the left well.
    pub a_bar: f64,
    /// Inner turning point of the right well.
    pub b_bar: f64,
    #[serde(rename = "I")]
    pub action: f64,
    /// Energy derivative of the action.
    #[serde(rename = "I_slope")]
    pub slope: f64,
    #[serde(rename = "I_L")]
    pub action_left: f64,
    #[serde(rename = "I_R")]
    pub action_right: f64,
}

/// Quadrature targets for the action and its slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionTolerance {
    pub action: QuadTolerance,
    pub slope: QuadTolerance,
}

impl Default for ActionTolerance {
    fn default() -> Self {
        ActionTolerance {
            // The absolute floor covers energies just under the barrier top,
            // where the action itself vanishes.
            action: QuadTolerance { abs: 1e-13, ..QuadTolerance::relative(1e-12) },
            slope: QuadTolerance::relative(1e-11),
        }
    }
}

/// Below this fraction of the half-interval the substituted integrand is
/// replaced by its Taylor form.
const TAYLOR_FRACTION: f64 = 1e-7;

fn check_energy(well: &DoubleWell, energy: f64) -> Result<()> {
    let a = well.analysis();
    let top = well.value(a.barrier_top);
    if !(energy < top) {
        return Err(Error::EnergyAboveBarrier { energy, barrier: top });
    }
    if !(energy > 0.0) {
        return Err(Error::EnergyBelowWellBottom { energy, bottom: 0.0, side: "left" });
    }
    let right_bottom = well.value(a.right_min);
    if !(energy > right_bottom) {
        return Err(Error::EnergyBelowWellBottom { energy, bottom: right_bottom, side: "right" });
    }
    Ok(())
}

/// Inner turning points `(a_bar, b_bar)` on the barrier side of each well.
pub fn turning_points(well: &DoubleWell, energy: f64) -> Result<(f64, f64)> {
    check_energy(well, energy)?;
    let a = well.analysis();
    let scale = (a.right_min - a.left_min).abs();
    let f = |x: f64| (well.value(x) - energy, well.d1(x));
    let left = safe_newton(f, a.left_min, a.barrier_top, 1e-16 * scale, 1e-15)?;
    let right = safe_newton(f, a.barrier_top, a.right_min, 1e-16 * scale, 1e-15)?;
    Ok((left, right))
}

/// `(V(x) - E) / t^2` at `x = origin + dir t^2`, with the Taylor form near the
/// turning point where the quotient cancels.
fn reduced_gap(well: &DoubleWell, energy: f64, origin: f64, dir: f64, span: f64, t: f64) -> f64 {
    let s = t * t;
    if s < TAYLOR_FRACTION * span {
        dir * well.d1(origin) + 0.5 * well.d2(origin) * s
    } else {
        ((well.value(origin + dir * s) - energy) / s).max(0.0)
    }
}

struct Half {
    origin: f64,
    dir: f64,
    span: f64,
}

fn halves(well: &DoubleWell, energy: f64) -> Result<[Half; 2]> {
    let (a_bar, b_bar) = turning_points(well, energy)?;
    let x_m = well.analysis().barrier_top;
    Ok([
        Half { origin: a_bar, dir: 1.0, span: x_m - a_bar },
        Half { origin: b_bar, dir: -1.0, span: b_bar - x_m },
    ])
}

fn half_action(well: &DoubleWell, energy: f64, h: &Half, tol: QuadTolerance) -> Result<f64> {
    let c = well.consts();
    let two_m = 2.0 * c.mass;
    let r = integrate(
        |t| 2.0 * t * t * (two_m * reduced_gap(well, energy, h.origin, h.dir, h.span, t)).sqrt(),
        0.0,
        h.span.sqrt(),
        tol,
    )?;
    Ok(r.value / c.hbar)
}

fn half_slope(well: &DoubleWell, energy: f64, h: &Half, tol: QuadTolerance) -> Result<f64> {
    let c = well.consts();
    let two_m = 2.0 * c.mass;
    let r = integrate(
        |t| two_m / (two_m * reduced_gap(well, energy, h.origin, h.dir, h.span, t)).sqrt(),
        0.0,
        h.span.sqrt(),
        tol,
    )?;
    Ok(-r.value / c.hbar)
}

/// `(1/hbar) * integral of sqrt(2m (V - E))` between the inner turning points.
pub fn gamow_integral(well: &DoubleWell, energy: f64) -> Result<f64> {
    gamow_integral_with(well, energy, ActionTolerance::default().action)
}

pub fn gamow_integral_with(well: &DoubleWell, energy: f64, tol: QuadTolerance) -> Result<f64> {
    let [l, r] = halves(well, energy)?;
    Ok(half_action(well, energy, &l, tol)? + half_action(well, energy, &r, tol)?)
}

/// Energy derivative of [`gamow_integral`], integrated directly.
pub fn action_slope(well: &DoubleWell, energy: f64) -> Result<f64> {
    let tol = ActionTolerance::default().slope;
    let [l, r] = halves(well, energy)?;
    Ok(half_slope(well, energy, &l, tol)? + half_slope(well, energy, &r, tol)?)
}

/// Action, slope and the split at the barrier top.
pub fn action_at(well: &DoubleWell, energy: f64, tol: &ActionTolerance) -> Result<ActionResult> {
    let [l, r] = halves(well, energy)?;
    let action_left = half_action(well, energy, &l, tol.action)?;
    let action_right = half_action(well, energy, &r, tol.action)?;
    let slope = half_slope(well, energy, &l, tol.slope)? + half_slope(well, energy, &r, tol.slope)?;
    Ok(ActionResult {
        energy,
        a_bar: l.origin,
        b_bar: r.origin,
        action: action_left + action_right,
        slope,
        action_left,
        action_right,
    })
}

/// Parameters of the two-parabola potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub omega_left: f64,
    pub omega_right: f64,
    pub barrier: f64,
}

/// `sqrt(1 - l) - l ln((1 + sqrt(1 - l)) / sqrt(l))`: the action of one
/// parabola below its cut, in units of the cut height over the quantum.
fn parabola_profile(lambda: f64) -> f64 {
    let root = (1.0 - lambda).sqrt();
    root - lambda * ((1.0 + root) / lambda.sqrt()).ln()
}

/// Closed-form left and right actions of the two-parabola potential at the
/// mean energy `mean_energy`, with the right minimum at `tilde_eps`.
pub fn double_oscillator_action(
    params: OscillatorParams,
    consts: PhysConstants,
    mean_energy: f64,
    tilde_eps: f64,
) -> Result<(f64, f64)> {
    let lambda_left = mean_energy / params.barrier;
    let lambda_right = (mean_energy - tilde_eps) / (params.barrier - tilde_eps);
    for lambda in [lambda_left, lambda_right] {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::LambdaOutOfRange { lambda, limit: 1.0 });
        }
    }
    let left = params.barrier / (consts.hbar * params.omega_left) * parabola_profile(lambda_left);
    let right = (params.barrier - tilde_eps) / (consts.hbar * params.omega_right) * parabola_profile(lambda_right);
    Ok((left, right))
}

/// Pieces of the small-energy expansion of the action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticActionParts {
    /// Left action at the bottom of the left well.
    #[serde(rename = "I_L0")]
    pub left_at_bottom: f64,
    #[serde(rename = "I_R0")]
    pub right_at_bottom: f64,
    /// Anharmonic constant of the left well.
    #[serde(rename = "A_L")]
    pub anharmonic_left: f64,
    #[serde(rename = "A_R")]
    pub anharmonic_right: f64,
    pub lambda_left: f64,
    pub lambda_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticAction {
    pub parts: AsymptoticActionParts,
    #[serde(rename = "I_asym")]
    pub action: f64,
}

/// Default ceiling on `lambda` for [`asymptotic_action`].
pub const MAX_LAMBDA: f64 = 0.3;

/// Action at the mean energy from the bottom-of-well actions and the
/// anharmonic constants, valid while the mean energy is small next to the
/// barrier.
pub fn asymptotic_action(well: &DoubleWell, max_lambda: f64) -> Result<AsymptoticAction> {
    let a = well.analysis();
    let c = well.consts();
    let tol = QuadTolerance { abs: 1e-12, ..QuadTolerance::relative(1e-12) };
    let lambda_left = a.mean_energy / a.barrier_height;
    let lambda_right = (a.mean_energy - a.tilde_eps) / (a.barrier_height - a.tilde_eps);
    for lambda in [lambda_left, lambda_right] {
        if !(lambda > 0.0 && lambda < max_lambda) {
            return Err(Error::LambdaOutOfRange { lambda, limit: max_lambda });
        }
    }
    let x_m = a.barrier_top;
    let right_bottom = well.value(a.right_min);
    let two_m = 2.0 * c.mass;

    let left_at_bottom =
        integrate(|x| (two_m * well.value(x).max(0.0)).sqrt(), a.left_min, x_m, tol)?.value / c.hbar;
    let right_at_bottom =
        integrate(|x| (two_m * (well.value(x) - right_bottom).max(0.0)).sqrt(), x_m, a.right_min, tol)?.value / c.hbar;

    let anharmonic = |side: Side| -> Result<f64> {
        let (x0, dir, bottom) = match side {
            Side::Left => (a.left_min, 1.0, 0.0),
            Side::Right => (a.right_min, -1.0, right_bottom),
        };
        let span = (x_m - x0).abs();
        let omega = a.omega(side);
        let harmonic = 0.5 * c.mass * omega * omega;
        let r1 = dir * well.d3(x0) / (3.0 * well.d2(x0));
        let integrand = |u: f64| {
            if u < 1e-5 * span {
                return -0.5 * r1;
            }
            let rho = (well.value(x0 + dir * u) - bottom) / (harmonic * u * u);
            (1.0 / rho.sqrt() - 1.0) / u
        };
        Ok(integrate(integrand, 0.0, span, tol)?.value)
    };
    let anharmonic_left = anharmonic(Side::Left)?;
    let anharmonic_right = anharmonic(Side::Right)?;

    let correction = |energy: f64, omega: f64, span: f64, anharmonic: f64| {
        let amplitude = (2.0 * energy / (c.mass * omega * omega)).sqrt();
        energy / (c.hbar * omega) * ((2.0 * span / amplitude).ln() + anharmonic + 0.5)
    };
    let action = left_at_bottom - correction(a.mean_energy, a.omega_left, x_m - a.left_min, anharmonic_left)
        + right_at_bottom
        - correction(a.mean_energy - a.tilde_eps, a.omega_right, a.right_min - x_m, anharmonic_right);
    Ok(AsymptoticAction {
        parts: AsymptoticActionParts {
            left_at_bottom,
            right_at_bottom,
            anharmonic_left,
            anharmonic_right,
            lambda_left,
            lambda_right,
        },
        action,
    })
}

/// How far the inner turning points sit outside the harmonic region of each
/// well: cubic over quadratic Taylor term at `a_bar` and `b_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolicDiagnostic {
    pub left: f64,
    pub right: f64,
}

pub fn parabolic_diagnostic(well: &DoubleWell, action: &ActionResult) -> ParabolicDiagnostic {
    ParabolicDiagnostic {
        left: well.cubic_to_quadratic_ratio(Side::Left, action.a_bar),
        right: well.cubic_to_quadratic_ratio(Side::Right, action.b_bar),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use std::f64::consts::LN_2;

    fn quartic(alpha: f64) -> DoubleWell {
        DoubleWell::from_spec(PotentialSpec::BiasedQuartic { alpha, a: 1.0, beta: 0.0 }, PhysConstants::default()).unwrap()
    }

    fn oscillator(wl: f64, wr: f64, te: f64, v0: f64) -> DoubleWell {
        DoubleWell::from_spec(
            PotentialSpec::DoubleOscillator { omega_left: wl, omega_right: wr, tilde_eps: te, barrier: v0 },
            PhysConstants::default(),
        )
        .unwrap()
    }

    #[test]
    fn quartic_turning_points_closed_form() {
        let w = quartic(1.0);
        let (a, b) = turning_points(&w, 0.5).unwrap();
        let expected = (1.0 - 0.5f64.sqrt()).sqrt();
        assert!((a + expected).abs() < 1e-14);
        assert!((b - expected).abs() < 1e-14);
        assert!((w.value(a) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn oscillator_turning_point_inverts_parabola() {
        let w = oscillator(1.0, 1.4, 0.1, 10.0);
        let (a, _) = turning_points(&w, 0.6).unwrap();
        let expected = w.analysis().left_min + (2.0 * 0.6f64).sqrt();
        assert!((a - expected).abs() < 1e-13);
    }

    #[test]
    fn energy_range_enforced() {
        let w = quartic(1.0);
        assert!(matches!(turning_points(&w, 1.0), Err(Error::EnergyAboveBarrier { .. })));
        assert!(matches!(turning_points(&w, 0.0), Err(Error::EnergyBelowWellBottom { .. })));
        let w = oscillator(1.0, 1.0, 0.5, 10.0);
        assert!(matches!(
            turning_points(&w, 0.4),
            Err(Error::EnergyBelowWellBottom { side: "right", .. })
        ));
    }

    #[test]
    fn quartic_action_matches_midpoint_reference() {
        let w = quartic(1.0);
        let e = 0.5;
        let (a, b) = turning_points(&w, e).unwrap();
        let n = 1_000_000;
        let h = (b - a) / n as f64;
        let reference: f64 = (0..n)
            .map(|i| {
                let x = a + (i as f64 + 0.5) * h;
                (2.0 * (w.value(x) - e)).max(0.0).sqrt()
            })
            .sum::<f64>()
            * h;
        let i = gamow_integral(&w, e).unwrap();
        assert!(((i - reference) / reference).abs() < 1e-6);
    }

    #[test]
    fn oscillator_left_action_example() {
        // lambda = 0.06 gives 8.4446 with the exact parabola integral.
        let (l, _) = double_oscillator_action(
            OscillatorParams { omega_left: 1.0, omega_right: 1.0, barrier: 10.0 },
            PhysConstants::default(),
            0.6,
            0.0,
        )
        .unwrap();
        assert!((l - 8.444_6).abs() < 1e-4, "{l}");
        let w = oscillator(1.0, 1.0, 0.0, 10.0);
        let a = action_at(&w, 0.6, &ActionTolerance::default()).unwrap();
        assert!(((a.action_left - l) / l).abs() < 1e-10);
    }

    #[test]
    fn oscillator_action_vanishes_at_barrier_top() {
        let (l, r) = double_oscillator_action(
            OscillatorParams { omega_left: 1.0, omega_right: 2.0, barrier: 5.0 },
            PhysConstants::default(),
            5.0,
            0.0,
        )
        .unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(r, 0.0);
        assert!(double_oscillator_action(
            OscillatorParams { omega_left: 1.0, omega_right: 2.0, barrier: 5.0 },
            PhysConstants::default(),
            -1.0,
            0.0,
        )
        .is_err());
    }

    #[test]
    fn oscillator_slope_matches_closed_form_derivative() {
        // d/dE of (V0 / hw) h(E / V0) is -ln((1 + sqrt(1 - l)) / sqrt(l)) / hw.
        let (wl, wr, te, v0) = (1.0, 1.6, 0.15, 12.0);
        let w = oscillator(wl, wr, te, v0);
        let e = w.analysis().mean_energy;
        let dh = |l: f64| -((1.0 + (1.0 - l).sqrt()) / l.sqrt()).ln();
        let expected = dh(e / v0) / wl + dh((e - te) / (v0 - te)) / wr;
        let slope = action_slope(&w, e).unwrap();
        assert!(((slope - expected) / expected).abs() < 1e-8);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let w = quartic(20.0);
        let e = w.analysis().mean_energy;
        let h = 1e-5 * e;
        let fd = (gamow_integral(&w, e + h).unwrap() - gamow_integral(&w, e - h).unwrap()) / (2.0 * h);
        let s = action_slope(&w, e).unwrap();
        assert!(((s - fd) / s).abs() < 1e-6);
        assert!(s < 0.0);
    }

    #[test]
    fn halves_add_up() {
        let w = DoubleWell::from_spec(
            PotentialSpec::Polynomial { coeffs: vec![20.0, 5.386, -39.0, -10.772, 18.0, 5.386, 1.0] },
            PhysConstants::default(),
        )
        .unwrap();
        let r = action_at(&w, w.analysis().mean_energy, &ActionTolerance::default()).unwrap();
        assert!((r.action - r.action_left - r.action_right).abs() < 1e-9);
        assert!(r.a_bar < w.analysis().barrier_top && w.analysis().barrier_top < r.b_bar);
    }

    #[test]
    fn action_shrinks_to_zero_at_barrier_top() {
        let w = quartic(4.0);
        let i = gamow_integral(&w, 4.0 * (1.0 - 1e-8)).unwrap();
        assert!(i < 1e-6);
    }

    #[test]
    fn refinement_does_not_move_action() {
        let w = quartic(30.0);
        let e = w.analysis().mean_energy;
        let coarse = gamow_integral_with(&w, e, QuadTolerance::relative(1e-11)).unwrap();
        let fine = gamow_integral_with(&w, e, QuadTolerance::relative(1e-13)).unwrap();
        assert!(((coarse - fine) / fine).abs() < 1e-11);
    }

    #[test]
    fn symmetric_quartic_anharmonic_constant_is_ln2() {
        let w = quartic(200.0);
        let r = asymptotic_action(&w, MAX_LAMBDA).unwrap();
        assert!((r.parts.anharmonic_left - LN_2).abs() < 1e-8);
        assert!((r.parts.anharmonic_right - r.parts.anharmonic_left).abs() < 1e-10);
    }

    #[test]
    fn oscillator_anharmonic_constants_vanish() {
        let w = oscillator(1.0, 1.3, 0.1, 20.0);
        let r = asymptotic_action(&w, MAX_LAMBDA).unwrap();
        assert!(r.parts.anharmonic_left.abs() < 1e-10);
        assert!(r.parts.anharmonic_right.abs() < 1e-10);
        assert!((r.parts.left_at_bottom - 20.0).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_gap_shrinks_with_hbar() {
        // The gap falls roughly like E ln E, i.e. by about 1.7 per halving.
        let mut gaps = Vec::new();
        for hbar in [0.4, 0.2, 0.1] {
            let w = DoubleWell::from_spec(
                PotentialSpec::BiasedQuartic { alpha: 50.0, a: 1.0, beta: 0.0 },
                PhysConstants { hbar, mass: 1.0 },
            )
            .unwrap();
            let asym = asymptotic_action(&w, MAX_LAMBDA).unwrap().action;
            let exact = gamow_integral(&w, w.analysis().mean_energy).unwrap();
            gaps.push((asym - exact).abs());
        }
        for pair in gaps.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(ratio > 1.5 && ratio < 2.2, "ratio {ratio}");
        }
    }

    #[test]
    fn lambda_ceiling_enforced() {
        let w = quartic(4.0);
        assert!(matches!(asymptotic_action(&w, 0.3), Err(Error::LambdaOutOfRange { .. })));
    }

    #[test]
    fn oscillator_lambda_identities() {
        let (v0, te, e, hw_l, hw_r): (f64, f64, f64, f64, f64) = (15.0, 0.2, 0.9, 1.1, 1.4);
        let lambda_l = e / v0;
        let lambda_r = (e - te) / (v0 - te);
        assert!(((v0 / hw_l) * lambda_l - e / hw_l).abs() < 1e-15);
        assert!(((v0 - te) / hw_r * lambda_r - (e - te) / hw_r).abs() < 1e-15);
    }
}
