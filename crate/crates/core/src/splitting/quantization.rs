//! Direct solution of the doublet matching condition
//! `zL zR = f(zL) f(zR) exp(-2 I(E))`.
//!
//! Each root is parametrized by its distance `g >= 0` beyond the bare level
//! `E_bar -+ |eps|/2`, which keeps full relative precision even when the
//! amplitude is many orders of magnitude below the bias.

use serde::Serialize;

use super::level_splitting;
use super::spectral::{f_of_zeta, ZETA_LIMIT};
use crate::action::gamow_integral;
use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::potential::{DoubleWell, WellAnalysis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizationRoots {
    /// Lower doublet level.
    #[serde(rename = "E_plus")]
    pub e_lower: f64,
    #[serde(rename = "E_minus")]
    pub e_upper: f64,
    /// Levels relative to the mean energy.
    #[serde(rename = "dE_plus")]
    pub shift_lower: f64,
    #[serde(rename = "dE_minus")]
    pub shift_upper: f64,
    /// `e_upper - e_lower`, assembled without cancellation.
    pub splitting: f64,
    pub residual_lower: f64,
    pub residual_upper: f64,
}

#[derive(Clone, Copy)]
enum Level {
    Lower,
    Upper,
}

struct Condition<'a> {
    well: &'a DoubleWell,
    params: &'a WellAnalysis,
    half_bias: f64,
}

impl Condition<'_> {
    /// Distances `(E - E_bar + eps/2, E - E_bar - eps/2)` for the level
    /// `g` beyond its bare position.
    fn offsets(&self, level: Level, g: f64) -> (f64, f64) {
        let bias = self.params.eps;
        let wide = bias.abs() + g;
        match (level, bias >= 0.0) {
            (Level::Lower, true) => (-g, -wide),
            (Level::Lower, false) => (-wide, -g),
            (Level::Upper, true) => (wide, g),
            (Level::Upper, false) => (g, wide),
        }
    }

    fn shift(&self, level: Level, g: f64) -> f64 {
        match level {
            Level::Lower => -self.half_bias - g,
            Level::Upper => self.half_bias + g,
        }
    }

    fn zetas(&self, level: Level, g: f64) -> (f64, f64) {
        let p = self.params;
        let (l, r) = self.offsets(level, g);
        (l / (p.hbar * p.omega_left), r / (p.hbar * p.omega_right))
    }

    fn residual(&self, level: Level, g: f64) -> Result<f64> {
        let (zl, zr) = self.zetas(level, g);
        let energy = self.params.mean_energy + self.shift(level, g);
        let action = gamow_integral(self.well, energy)?;
        Ok(zl * zr - f_of_zeta(zl)? * f_of_zeta(zr)? * (-2.0 * action).exp())
    }

    fn within_doublet(&self, level: Level, g: f64) -> bool {
        let (zl, zr) = self.zetas(level, g);
        zl.abs() <= ZETA_LIMIT && zr.abs() <= ZETA_LIMIT
    }

    fn solve(&self, level: Level, estimate: f64) -> Result<(f64, f64)> {
        let scale = (self.params.hbar * self.params.omega_left).min(self.params.hbar * self.params.omega_right);
        let mut hi = 10.0 * estimate.max(f64::MIN_POSITIVE);
        loop {
            if !self.within_doublet(level, hi) {
                return Err(Error::RootNotBracketed { estimate: self.params.mean_energy + self.shift(level, estimate) });
            }
            if self.residual(level, hi)? > 0.0 {
                break;
            }
            hi = (10.0 * hi).max(1e-300 * scale);
        }
        // Residual and its sign at g = 0 are negative by construction.
        let mut failure = None;
        let g = brent(
            |g| match self.residual(level, g) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            hi,
            0.0,
            1e-13,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((g, self.residual(level, g)?))
    }
}

/// Lower and upper doublet levels from the matching condition, with the
/// action recomputed by quadrature at every trial energy. `params` supplies
/// the bias and frequencies; the action comes from `well`.
pub fn solve_quantization(well: &DoubleWell, params: &WellAnalysis) -> Result<QuantizationRoots> {
    let cond = Condition { well, params, half_bias: params.eps.abs() / 2.0 };
    let action = gamow_integral(well, params.mean_energy)?;
    let amplitude = super::delta_zeroth_order(params, action);
    // Closed-form distance beyond the bare levels, without cancellation.
    let estimate = amplitude * amplitude / (2.0 * (level_splitting(params.eps, amplitude) + params.eps.abs()));
    let (g_lower, residual_lower) = cond.solve(Level::Lower, estimate)?;
    let (g_upper, residual_upper) = cond.solve(Level::Upper, estimate)?;
    let shift_lower = cond.shift(Level::Lower, g_lower);
    let shift_upper = cond.shift(Level::Upper, g_upper);
    Ok(QuantizationRoots {
        e_lower: params.mean_energy + shift_lower,
        e_upper: params.mean_energy + shift_upper,
        shift_lower,
        shift_upper,
        splitting: params.eps.abs() + g_lower + g_upper,
        residual_lower,
        residual_upper,
    })
}
