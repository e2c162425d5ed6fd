//! Gamma function and the matching functions `g` and `f` of the
//! quantization condition.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// First-order coefficient of `f(z) / f(0)`: `EULER_GAMMA - ln 2`.
pub const K: f64 = EULER_GAMMA - LN_2;

/// Largest `|zeta|` for which a level is still counted as part of the doublet.
pub const ZETA_LIMIT: f64 = 0.4;

const GAMMA_MIN: f64 = 0.25;
const GAMMA_MAX: f64 = 2.5;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(z: f64) -> f64 {
    // Valid for z >= 0.5.
    let z = z - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// Gamma function on `[0.25, 2.5]`.
pub fn gamma_fn(z: f64) -> Result<f64> {
    if !(GAMMA_MIN..=GAMMA_MAX).contains(&z) {
        return Err(Error::OutOfSupportedRange { arg: z, lo: GAMMA_MIN, hi: GAMMA_MAX });
    }
    if z < 0.5 {
        Ok(lanczos(z + 1.0) / z)
    } else {
        Ok(lanczos(z))
    }
}

/// `g(z) = sqrt(2 pi) (z + 1/2)^(z + 1/2) exp(-(z + 1/2))`, defined for `z > -1/2`.
pub fn g_of_zeta(zeta: f64) -> Result<f64> {
    let s = zeta + 0.5;
    if !(s > 0.0) {
        return Err(Error::DomainError(zeta));
    }
    Ok((2.0 * PI).sqrt() * (s * s.ln() - s).exp())
}

/// `f(z) = cos(pi z) Gamma(1 - z) g(z) / (2 pi)` for `|z| <= 0.4`.
pub fn f_of_zeta(zeta: f64) -> Result<f64> {
    if !(zeta.abs() <= ZETA_LIMIT) {
        return Err(Error::OutOfSupportedRange { arg: zeta, lo: -ZETA_LIMIT, hi: ZETA_LIMIT });
    }
    Ok((PI * zeta).cos() * gamma_fn(1.0 - zeta)? * g_of_zeta(zeta)? / (2.0 * PI))
}

/// `f(0) = 1 / sqrt(4 e pi)`.
pub fn f_at_zero() -> f64 {
    1.0 / (4.0 * E * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_anchors() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(1.5).unwrap(), 0.5 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(2.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-14);
    }

    #[test]
    fn gamma_against_tabulated_constants() {
        assert!(rel(gamma_fn(0.25).unwrap(), 3.625_609_908_221_908_3) < 1e-13);
        assert!(rel(gamma_fn(1.0 / 3.0).unwrap(), 2.678_938_534_707_747_6) < 1e-13);
        assert!(rel(gamma_fn(0.75).unwrap(), 1.225_416_702_465_177_6) < 1e-13);
        assert!(rel(gamma_fn(1.461_632_144_968_362_3).unwrap(), 0.885_603_194_410_888_7) < 1e-13);
    }

    #[test]
    fn gamma_recurrence_holds_across_range() {
        for i in 0..=100 {
            let z = 0.25 + 1.25 * i as f64 / 100.0;
            let lhs = gamma_fn(z + 1.0).unwrap();
            let rhs = z * gamma_fn(z).unwrap();
            assert!(rel(lhs, rhs) < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn gamma_range_enforced() {
        assert!(matches!(gamma_fn(0.2), Err(Error::OutOfSupportedRange { .. })));
        assert!(matches!(gamma_fn(2.6), Err(Error::OutOfSupportedRange { .. })));
    }

    #[test]
    fn k_value_and_sign() {
        assert!((K + 0.115_931).abs() < 1e-6);
    }

    #[test]
    fn g_closed_forms() {
        assert!(rel(g_of_zeta(0.0).unwrap(), PI.sqrt() * (-0.5f64).exp()) < 1e-15);
        assert!(rel(g_of_zeta(0.5).unwrap(), (2.0 * PI).sqrt() / E) < 1e-15);
        assert!((g_of_zeta(0.0).unwrap() - 1.07505).abs() < 1e-5);
        assert!((g_of_zeta(0.5).unwrap() - 0.92214).abs() < 1e-5);
        assert!(matches!(g_of_zeta(-0.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn g_decreases_then_rises() {
        // g'(z) = g(z) ln(z + 1/2): minimum at z = 1/2.
        let mut prev = g_of_zeta(0.0).unwrap();
        for i in 1..=50 {
            let v = g_of_zeta(0.5 * i as f64 / 50.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        for i in 1..=50 {
            let v = g_of_zeta(0.5 + 0.5 * i as f64 / 50.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn f_at_origin() {
        let f0 = f_of_zeta(0.0).unwrap();
        assert!(rel(f0, f_at_zero()) < 1e-14);
        assert!((f0 - 0.171_099).abs() < 1e-6);
        assert!((f0 * f0 - 0.029_28).abs() < 1e-5);
    }

    #[test]
    fn f_expansion_linear_coefficient_is_k() {
        let h = 1e-5;
        let slope = (f_of_zeta(h).unwrap() - f_of_zeta(-h).unwrap()) / (2.0 * h) / f_at_zero();
        assert!((slope - K).abs() < 1e-8);
    }

    #[test]
    fn f_expansion_residual_bound_calibrated() {
        // The quadratic coefficient of f/f(0) is about -3.1, so the residual
        // beyond 1 + k z is bounded by 3.2 z^2 for |z| <= 0.1.
        let mut worst: f64 = 0.0;
        for i in 1..=1000 {
            let z = -0.1 + 0.2 * i as f64 / 1000.0;
            if z == 0.0 {
                continue;
            }
            let r = (f_of_zeta(z).unwrap() / f_at_zero() - 1.0 - K * z).abs() / (z * z);
            worst = worst.max(r);
        }
        assert!(worst > 2.9 && worst < 3.2, "worst ratio {worst}");
    }

    #[test]
    fn f_range_enforced() {
        assert!(f_of_zeta(0.4).is_ok());
        assert!(f_of_zeta(-0.41).is_err());
    }
}
