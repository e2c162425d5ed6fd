//! Quadratic least-squares fit of `ln delta` against the bias offset.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 5;

/// `ln delta = ln c0 + c1 x + c2 x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Root-mean-square residual in `ln delta`.
    pub rms_residual: f64,
}

impl FitResult {
    pub fn ln_value(&self, x: f64) -> f64 {
        self.c0.ln() + self.c1 * x + self.c2 * x * x
    }
}

pub fn fit_log_quadratic(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::FitIllConditioned("abscissae and values differ in length".into()));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitIllConditioned(format!("need at least {MIN_FIT_POINTS} points, got {}", xs.len())));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
        return Err(Error::FitIllConditioned(format!("cannot take the logarithm of {y}")));
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    if !(hi > lo) {
        return Err(Error::FitIllConditioned("all abscissae coincide".into()));
    }
    // Columns in a centred, scaled variable keep the normal matrix tame.
    let center = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    let n = xs.len();
    let design = DMatrix::from_fn(n, 3, |i, j| ((xs[i] - center) / scale).powi(j as i32));
    let target = DVector::from_iterator(n, ys.iter().map(|y| y.ln()));
    let svd = design.clone().svd(true, true);
    let singular = &svd.singular_values;
    if singular.min() <= 1e-12 * singular.max() {
        return Err(Error::FitIllConditioned("design matrix is rank deficient".into()));
    }
    let b = svd.solve(&target, 0.0).map_err(|e| Error::FitIllConditioned(e.to_string()))?;
    let residual = &design * &b - &target;
    let rms_residual = (residual.norm_squared() / n as f64).sqrt();
    // Back to powers of x.
    let (b0, b1, b2) = (b[0], b[1] / scale, b[2] / (scale * scale));
    Ok(FitResult {
        c0: (b0 - b1 * center + b2 * center * center).exp(),
        c1: b1 - 2.0 * b2 * center,
        c2: b2,
        rms_residual,
    })
}
