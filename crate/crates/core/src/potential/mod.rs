//! One-dimensional double-well potentials and their analysis.

mod well;

pub use well::{AnalysisOptions, DoubleWell, Orientation, Side, WellAnalysis};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::dd::Real;

/// Reduced Planck constant and particle mass in the caller's unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        PhysConstants { hbar: 1.0, mass: 1.0 }
    }
}

impl PhysConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let c = PhysConstants { hbar, mass };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidConstants(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be positive, got {}", self.mass)));
        }
        Ok(())
    }
}

/// Declarative description of a potential family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `alpha (x^2 - a^2)^2 + beta (x + a)`.
    BiasedQuartic { alpha: f64, a: f64, beta: f64 },
    /// Two parabolas joined at `x = 0`, minima `0` (left) and `tilde_eps`
    /// (right), both reaching `V0` at the junction.
    DoubleOscillator {
        #[serde(rename = "omega_L")]
        omega_left: f64,
        #[serde(rename = "omega_R")]
        omega_right: f64,
        tilde_eps: f64,
        #[serde(rename = "V0")]
        barrier: f64,
    },
    /// `sum_i coeffs[i] x^i`.
    Polynomial { coeffs: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be finite")))
            }
        };
        match *self {
            PotentialSpec::BiasedQuartic { alpha, a, beta } => {
                finite("alpha", alpha)?;
                finite("a", a)?;
                finite("beta", beta)?;
                if alpha <= 0.0 || a <= 0.0 {
                    return Err(Error::InvalidSpec("biased quartic needs alpha > 0 and a > 0".into()));
                }
            }
            PotentialSpec::DoubleOscillator { omega_left, omega_right, tilde_eps, barrier } => {
                for (n, v) in [("omega_L", omega_left), ("omega_R", omega_right), ("tilde_eps", tilde_eps), ("V0", barrier)] {
                    finite(n, v)?;
                }
                if omega_left <= 0.0 || omega_right <= 0.0 {
                    return Err(Error::InvalidSpec("double oscillator needs positive frequencies".into()));
                }
                if !(barrier > tilde_eps && tilde_eps >= 0.0) {
                    return Err(Error::InvalidSpec("double oscillator needs V0 > tilde_eps >= 0".into()));
                }
            }
            PotentialSpec::Polynomial { ref coeffs } => {
                for c in coeffs {
                    finite("polynomial coefficient", *c)?;
                }
                let degree = coeffs.iter().rposition(|c| *c != 0.0);
                match degree {
                    Some(d) if d >= 2 && d % 2 == 0 && coeffs[d] > 0.0 => {}
                    _ => {
                        return Err(Error::InvalidSpec(
                            "polynomial must have even degree >= 2 and a positive leading coefficient".into(),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// The same potential reflected through `x = 0`. Only smooth families
    /// can be mirrored; a double oscillator is returned unchanged.
    pub fn mirrored(&self) -> PotentialSpec {
        match self {
            PotentialSpec::DoubleOscillator { .. } => self.clone(),
            _ => PotentialSpec::Polynomial {
                coeffs: self
                    .coefficients()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { *c })
                    .collect(),
            },
        }
    }

    /// Ascending power-series coefficients of the polynomial families.
    fn coefficients(&self) -> Vec<f64> {
        match *self {
            PotentialSpec::BiasedQuartic { alpha, a, beta } => {
                vec![alpha * a.powi(4) + beta * a, beta, -2.0 * alpha * a * a, 0.0, alpha]
            }
            PotentialSpec::Polynomial { ref coeffs } => {
                let d = coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0);
                coeffs[..=d].to_vec()
            }
            PotentialSpec::DoubleOscillator { .. } => Vec::new(),
        }
    }
}

/// Smooth step of height `amount` rising from `from` to `to`, flat to all
/// orders up to the second derivative at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothBias {
    pub from: f64,
    pub to: f64,
    pub amount: f64,
}

impl SmoothBias {
    fn t<T: Real>(&self, x: T) -> T {
        (x - T::from_f64(self.from)) / T::from_f64(self.to - self.from)
    }

    fn value<T: Real>(&self, x: T) -> T {
        let c = |v: f64| T::from_f64(v);
        let t = self.t(x);
        if t <= c(0.0) {
            c(0.0)
        } else if t >= c(1.0) {
            c(self.amount)
        } else {
            c(self.amount) * t * t * t * (c(10.0) + t * (c(-15.0) + c(6.0) * t))
        }
    }

    /// Derivative of order 1, 2 or 3.
    fn derivative(&self, x: f64, order: u32) -> f64 {
        let t = self.t(x);
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 / (self.to - self.from);
        let a = self.amount;
        match order {
            1 => a * s * 30.0 * t * t * (1.0 - t) * (1.0 - t),
            2 => a * s * s * 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
            3 => a * s.powi(3) * 60.0 * (1.0 - 6.0 * t + 6.0 * t * t),
            _ => unreachable!(),
        }
    }
}

/// A potential family bound to physical constants, with an optional smooth
/// bias step. Evaluation is in the caller's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    spec: PotentialSpec,
    consts: PhysConstants,
    bias: Option<SmoothBias>,
    poly: Vec<f64>,
    derivs: [Vec<f64>; 3],
}

impl Potential {
    pub fn new(spec: PotentialSpec, consts: PhysConstants) -> Result<Self> {
        spec.validate()?;
        consts.validate()?;
        let poly = spec.coefficients();
        let d1 = differentiate(&poly);
        let d2 = differentiate(&d1);
        let d3 = differentiate(&d2);
        Ok(Potential { spec, consts, bias: None, poly, derivs: [d1, d2, d3] })
    }

    pub fn with_bias(mut self, bias: SmoothBias) -> Self {
        self.bias = Some(bias);
        self
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn consts(&self) -> PhysConstants {
        self.consts
    }

    pub fn bias(&self) -> Option<SmoothBias> {
        self.bias
    }

    /// Minima positions of the double oscillator, `(x_L, x_R)`.
    pub(crate) fn oscillator_minima(&self) -> Option<(f64, f64)> {
        match self.spec {
            PotentialSpec::DoubleOscillator { omega_left, omega_right, tilde_eps, barrier } => {
                let m = self.consts.mass;
                Some((
                    -(2.0 * barrier / m).sqrt() / omega_left,
                    (2.0 * (barrier - tilde_eps) / m).sqrt() / omega_right,
                ))
            }
            _ => None,
        }
    }

    /// `V(x)`, at any supported precision.
    pub fn value_in<T: Real>(&self, x: T) -> T {
        let base = match self.spec {
            PotentialSpec::DoubleOscillator { omega_left, omega_right, tilde_eps, .. } => {
                let (xl, xr) = self.oscillator_minima().expect("oscillator");
                let half_m = 0.5 * self.consts.mass;
                if x <= T::from_f64(0.0) {
                    let u = x - T::from_f64(xl);
                    T::from_f64(half_m * omega_left * omega_left) * u * u
                } else {
                    let u = x - T::from_f64(xr);
                    T::from_f64(tilde_eps) + T::from_f64(half_m * omega_right * omega_right) * u * u
                }
            }
            PotentialSpec::BiasedQuartic { alpha, a, beta } => {
                let s = x * x - T::from_f64(a * a);
                T::from_f64(alpha) * s * s + T::from_f64(beta) * (x + T::from_f64(a))
            }
            PotentialSpec::Polynomial { .. } => horner(&self.poly, x),
        };
        match self.bias {
            Some(b) => base + b.value(x),
            None => base,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_in(x)
    }

    /// Derivative of order 1, 2 or 3. At the double-oscillator junction the
    /// left branch is used.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        let base = match self.spec {
            PotentialSpec::DoubleOscillator { omega_left, omega_right, .. } => {
                let (xl, xr) = self.oscillator_minima().expect("oscillator");
                let m = self.consts.mass;
                let (w, x0) = if x <= 0.0 { (omega_left, xl) } else { (omega_right, xr) };
                match order {
                    1 => m * w * w * (x - x0),
                    2 => m * w * w,
                    _ => 0.0,
                }
            }
            _ => horner(&self.derivs[order as usize - 1], x),
        };
        match self.bias {
            Some(b) => base + b.derivative(x, order),
            None => base,
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.derivative(x, 1)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.derivative(x, 2)
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.derivative(x, 3)
    }

    /// Radius enclosing every critical point of the unbiased polynomial part.
    pub(crate) fn critical_radius(&self) -> f64 {
        match self.spec {
            PotentialSpec::DoubleOscillator { .. } => {
                let (xl, xr) = self.oscillator_minima().expect("oscillator");
                xl.abs().max(xr.abs())
            }
            _ => fujiwara_bound(&differentiate(&self.poly)),
        }
    }
}

fn horner<T: Real>(coeffs: &[f64], x: T) -> T {
    let mut acc = T::from_f64(0.0);
    for c in coeffs.iter().rev() {
        acc = acc * x + T::from_f64(*c);
    }
    acc
}

fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

/// Fujiwara's bound on the moduli of polynomial roots.
fn fujiwara_bound(coeffs: &[f64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let mut c = (coeffs[n - k] / lead).abs();
        if k == n {
            c /= 2.0;
        }
        bound = bound.max(c.powf(1.0 / k as f64));
    }
    2.0 * bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dd::Dd;

    fn quartic(alpha: f64, a: f64, beta: f64) -> Potential {
        Potential::new(PotentialSpec::BiasedQuartic { alpha, a, beta }, PhysConstants::default()).unwrap()
    }

    #[test]
    fn symmetric_quartic_values() {
        let v = quartic(1.0, 1.0, 0.0);
        assert_eq!(v.value(0.0), 1.0);
        assert_eq!(v.value(1.0), 0.0);
        assert_eq!(v.value(-1.0), 0.0);
    }

    #[test]
    fn quartic_derivatives_are_analytic() {
        let (alpha, a, beta) = (3.0, 1.2, 0.15);
        let v = quartic(alpha, a, beta);
        for &x in &[-1.7, -0.3, 0.0, 0.8, 2.1] {
            let direct = alpha * (x * x - a * a).powi(2) + beta * (x + a);
            assert!((v.value(x) - direct).abs() < 1e-12 * direct.abs().max(1.0));
            assert!((v.d1(x) - (4.0 * alpha * x * (x * x - a * a) + beta)).abs() < 1e-12);
            assert!((v.d2(x) - alpha * (12.0 * x * x - 4.0 * a * a)).abs() < 1e-12);
            assert!((v.d3(x) - 24.0 * alpha * x).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillator_branches() {
        let spec = PotentialSpec::DoubleOscillator { omega_left: 1.0, omega_right: 1.5, tilde_eps: 0.2, barrier: 10.0 };
        let v = Potential::new(spec, PhysConstants::default()).unwrap();
        let (xl, xr) = v.oscillator_minima().unwrap();
        assert_eq!(v.value(xl), 0.0);
        assert!((v.value(xr) - 0.2).abs() < 1e-14);
        assert!((v.value(0.0) - 10.0).abs() < 1e-12);
        assert!((v.value(1e-12) - 10.0).abs() < 1e-9);
        // Left branch at the junction.
        assert_eq!(v.d2(0.0), 1.0);
        assert_eq!(v.d2(1e-300), 2.25);
    }

    #[test]
    fn mirrored_polynomial_reflects() {
        let spec = PotentialSpec::Polynomial { coeffs: vec![0.3, 0.1, -2.0, 0.05, 1.0] };
        let a = Potential::new(spec.clone(), PhysConstants::default()).unwrap();
        let b = Potential::new(spec.mirrored(), PhysConstants::default()).unwrap();
        for &x in &[-1.3, -0.2, 0.7] {
            assert!((a.value(x) - b.value(-x)).abs() < 1e-14);
        }
    }

    #[test]
    fn mirrored_quartic_reflects() {
        let spec = PotentialSpec::BiasedQuartic { alpha: 2.0, a: 0.9, beta: 0.3 };
        let a = Potential::new(spec.clone(), PhysConstants::default()).unwrap();
        let b = Potential::new(spec.mirrored(), PhysConstants::default()).unwrap();
        for &x in &[-1.3, -0.2, 0.7] {
            assert!((a.value(x) - b.value(-x)).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = [
            PotentialSpec::BiasedQuartic { alpha: -1.0, a: 1.0, beta: 0.0 },
            PotentialSpec::DoubleOscillator { omega_left: 1.0, omega_right: 1.0, tilde_eps: 2.0, barrier: 1.0 },
            PotentialSpec::Polynomial { coeffs: vec![0.0, 0.0, 1.0, 0.0, -1.0] },
            PotentialSpec::Polynomial { coeffs: vec![0.0, 0.0, 1.0, 1.0] },
        ];
        for s in bad {
            assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))), "{s:?}");
        }
        assert!(PhysConstants::new(0.0, 1.0).is_err());
    }

    #[test]
    fn smooth_bias_profile() {
        let b = SmoothBias { from: -1.0, to: 1.0, amount: 0.5 };
        assert_eq!(b.value(-2.0f64), 0.0);
        assert_eq!(b.value(2.0f64), 0.5);
        assert!((b.value(0.0f64) - 0.25).abs() < 1e-15);
        assert_eq!(b.derivative(-1.0, 1), 0.0);
        assert_eq!(b.derivative(1.0, 2), 0.0);
        let h = 1e-6;
        let fd = (b.value(0.3 + h) - b.value(0.3 - h)) / (2.0 * h);
        assert!((fd - b.derivative(0.3, 1)).abs() < 1e-9);
        // Reversed direction rises toward `to`.
        let r = SmoothBias { from: 1.0, to: -1.0, amount: 0.5 };
        assert_eq!(r.value(-2.0f64), 0.5);
        assert_eq!(r.value(2.0f64), 0.0);
    }

    #[test]
    fn extended_precision_matches_double() {
        let v = quartic(3.0, 1.0, 0.15);
        for &x in &[-1.1, 0.05, 0.9] {
            let d = v.value_in(Dd::from(x)).to_f64();
            assert!((d - v.value(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn critical_radius_encloses_extrema() {
        let v = quartic(1.0, 2.0, 0.0);
        assert!(v.critical_radius() >= 2.0);
        assert!(v.critical_radius() < 10.0);
    }
}
