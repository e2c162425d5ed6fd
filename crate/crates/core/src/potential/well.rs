use serde::{Deserialize, Serialize};

use super::{Potential, PotentialSpec, SmoothBias};
use crate::error::{Error, Result};
use crate::numerics::roots::safe_newton;

/// Which well is called "left" in the working frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Mirror if needed so that the left well is the lower one.
    #[default]
    Auto,
    /// Keep the caller's coordinates even if the right well is lower.
    AsGiven,
    /// Always work in the mirror image `x -> -x`.
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    /// Scan window `[lo, hi]` in caller coordinates; derived from the
    /// potential when absent.
    pub window: Option<[f64; 2]>,
    pub scan_points: usize,
    pub orientation: Orientation,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { window: None, scan_points: 4096, orientation: Orientation::Auto }
    }
}

/// Landmarks of a double well in the working frame, where the left minimum
/// sits at zero energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellAnalysis {
    #[serde(rename = "x_L")]
    pub left_min: f64,
    #[serde(rename = "x_R")]
    pub right_min: f64,
    #[serde(rename = "x_m")]
    pub barrier_top: f64,
    #[serde(rename = "omega_L")]
    pub omega_left: f64,
    #[serde(rename = "omega_R")]
    pub omega_right: f64,
    /// Offset of the right minimum above the left one.
    pub tilde_eps: f64,
    /// Bias including the zero-point energy difference.
    pub eps: f64,
    /// Mean of the two harmonic ground energies.
    #[serde(rename = "E_bar")]
    pub mean_energy: f64,
    /// Barrier top above the left minimum.
    #[serde(rename = "V0")]
    pub barrier_height: f64,
    /// Constant subtracted from the caller's potential.
    pub zero_shift: f64,
    /// Whether the working frame is the mirror image of the caller's.
    pub mirrored: bool,
    pub hbar: f64,
    pub mass: f64,
}

impl WellAnalysis {
    /// `tilde_eps + hbar (omega_R - omega_L) / 2`.
    pub fn eps_for(tilde_eps: f64, omega_left: f64, omega_right: f64, hbar: f64) -> f64 {
        tilde_eps + hbar * (omega_right - omega_left) / 2.0
    }

    /// `hbar (omega_L + omega_R) / 4 + tilde_eps / 2`.
    pub fn mean_energy_for(tilde_eps: f64, omega_left: f64, omega_right: f64, hbar: f64) -> f64 {
        hbar * (omega_left + omega_right) / 4.0 + tilde_eps / 2.0
    }

    /// The same landmarks with a different minimum offset, keeping positions,
    /// frequencies and barrier. Used to move along the bias axis without
    /// touching the potential shape.
    pub fn rebiased(&self, tilde_eps: f64) -> WellAnalysis {
        WellAnalysis {
            tilde_eps,
            eps: Self::eps_for(tilde_eps, self.omega_left, self.omega_right, self.hbar),
            mean_energy: Self::mean_energy_for(tilde_eps, self.omega_left, self.omega_right, self.hbar),
            ..*self
        }
    }

    pub fn omega(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.omega_left,
            Side::Right => self.omega_right,
        }
    }

    pub fn minimum(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.left_min,
            Side::Right => self.right_min,
        }
    }

    /// `hbar omega_L`, the natural energy unit of the lower well.
    pub fn quantum_left(&self) -> f64 {
        self.hbar * self.omega_left
    }
}

/// A potential together with its analysis, evaluated in the working frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWell {
    potential: Potential,
    analysis: WellAnalysis,
}

struct Critical {
    x: f64,
    v: f64,
}

impl DoubleWell {
    pub fn from_spec(spec: PotentialSpec, consts: super::PhysConstants) -> Result<Self> {
        Self::analyze(Potential::new(spec, consts)?, &AnalysisOptions::default())
    }

    pub fn analyze(potential: Potential, opts: &AnalysisOptions) -> Result<Self> {
        let (left, top, right) = match (&potential.spec, potential.bias) {
            (PotentialSpec::DoubleOscillator { barrier, tilde_eps, .. }, None) => {
                let (xl, xr) = potential.oscillator_minima().expect("oscillator");
                (Critical { x: xl, v: 0.0 }, Critical { x: 0.0, v: *barrier }, Critical { x: xr, v: *tilde_eps })
            }
            _ => scan_critical_points(&potential, opts)?,
        };
        let mirrored = match opts.orientation {
            // Offsets at rounding level count as a tie and keep the caller's frame.
            Orientation::Auto => right.v < left.v - 1e-12 * (top.v - left.v.min(right.v)).abs(),
            Orientation::AsGiven => false,
            Orientation::Mirrored => true,
        };
        let (lo, hi) = if mirrored { (&right, &left) } else { (&left, &right) };
        let s = if mirrored { -1.0 } else { 1.0 };
        let consts = potential.consts;
        // Curvatures this far below the barrier scale are quartic-flat minima
        // seen through rounding.
        let flat = 1e-9 * (top.v - lo.v.min(hi.v)).abs() / (hi.x - lo.x).powi(2);
        let omega = |x: f64| -> Result<f64> {
            let curvature = potential.d2(x);
            if !(curvature > flat) {
                return Err(Error::NonConvexMinimum { x, curvature });
            }
            Ok((curvature / consts.mass).sqrt())
        };
        let omega_left = omega(lo.x)?;
        let omega_right = omega(hi.x)?;
        let zero_shift = lo.v;
        let tilde_eps = hi.v - zero_shift;
        let barrier_height = top.v - zero_shift;
        let analysis = WellAnalysis {
            left_min: s * lo.x,
            right_min: s * hi.x,
            barrier_top: s * top.x,
            omega_left,
            omega_right,
            tilde_eps,
            eps: WellAnalysis::eps_for(tilde_eps, omega_left, omega_right, consts.hbar),
            mean_energy: WellAnalysis::mean_energy_for(tilde_eps, omega_left, omega_right, consts.hbar),
            barrier_height,
            zero_shift,
            mirrored,
            hbar: consts.hbar,
            mass: consts.mass,
        };
        Ok(DoubleWell { potential, analysis })
    }

    /// Fails with `DegenerateBarrier` unless the barrier top lies above the
    /// mean energy and the right minimum, i.e. unless there is a barrier to
    /// tunnel through.
    pub fn check_barrier(&self) -> Result<()> {
        let a = &self.analysis;
        let reference = a.mean_energy.max(a.tilde_eps);
        if a.barrier_height <= reference {
            return Err(Error::DegenerateBarrier { barrier: a.barrier_height, energy: reference });
        }
        Ok(())
    }

    pub fn analysis(&self) -> &WellAnalysis {
        &self.analysis
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn consts(&self) -> super::PhysConstants {
        self.potential.consts
    }

    fn sign(&self) -> f64 {
        if self.analysis.mirrored {
            -1.0
        } else {
            1.0
        }
    }

    /// Working-frame coordinate mapped to the caller's frame (and back).
    pub fn to_caller(&self, x: f64) -> f64 {
        self.sign() * x
    }

    /// Normalized potential in the working frame.
    pub fn value(&self, x: f64) -> f64 {
        self.potential.value(self.sign() * x) - self.analysis.zero_shift
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.sign() * self.potential.d1(self.sign() * x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.potential.d2(self.sign() * x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.sign() * self.potential.d3(self.sign() * x)
    }

    /// Actual potential at the bottom of a well.
    pub fn bottom(&self, side: Side) -> f64 {
        match side {
            Side::Left => 0.0,
            Side::Right => self.analysis.tilde_eps,
        }
    }

    /// Whether the potential is the two-parabola family with its junction cusp.
    pub fn has_junction_cusp(&self) -> bool {
        matches!(self.potential.spec, PotentialSpec::DoubleOscillator { .. })
    }

    /// Size of the cubic Taylor term relative to the quadratic one at `x`,
    /// expanded about the minimum on `side`. Small values mean the harmonic
    /// approximation of that well still holds at `x`.
    pub fn cubic_to_quadratic_ratio(&self, side: Side, x: f64) -> f64 {
        let x0 = self.analysis.minimum(side);
        (self.d3(x0) * (x - x0) / (3.0 * self.d2(x0))).abs()
    }

    /// The same potential with the right well lifted to `tilde_eps` above the
    /// left one. Minima positions and curvatures are unchanged; for smooth
    /// families a quintic step is added between the minima, for the double
    /// oscillator the offset parameter is replaced.
    pub fn physically_rebiased(&self, tilde_eps: f64, opts: &AnalysisOptions) -> Result<DoubleWell> {
        if self.potential.bias.is_some() {
            return Err(Error::InvalidSpec("potential already carries a bias step".into()));
        }
        let opts = AnalysisOptions {
            orientation: if self.analysis.mirrored { Orientation::Mirrored } else { Orientation::AsGiven },
            ..opts.clone()
        };
        let potential = match self.potential.spec {
            PotentialSpec::DoubleOscillator { omega_left, omega_right, barrier, .. } if !self.analysis.mirrored => {
                let spec = PotentialSpec::DoubleOscillator { omega_left, omega_right, tilde_eps, barrier };
                Potential::new(spec, self.potential.consts)?
            }
            _ => self.potential.clone().with_bias(SmoothBias {
                from: self.to_caller(self.analysis.left_min),
                to: self.to_caller(self.analysis.right_min),
                amount: tilde_eps - self.analysis.tilde_eps,
            }),
        };
        DoubleWell::analyze(potential, &opts)
    }
}

fn scan_critical_points(potential: &Potential, opts: &AnalysisOptions) -> Result<(Critical, Critical, Critical)> {
    let [lo, hi] = match opts.window {
        Some(w) => w,
        None => {
            let r = 1.1 * potential.critical_radius() + f64::MIN_POSITIVE;
            let r = match potential.bias {
                Some(b) => r.max(1.1 * b.from.abs()).max(1.1 * b.to.abs()),
                None => r,
            };
            [-r, r]
        }
    };
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("scan window [{lo}, {hi}] is empty")));
    }
    let n = opts.scan_points.max(16);
    let scale = hi.abs().max(lo.abs());
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| potential.d1(x)).collect();
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (ds[i], ds[i + 1]);
        let falling_to_rising = a < 0.0 && b >= 0.0;
        let rising_to_falling = a >= 0.0 && b < 0.0;
        if !(falling_to_rising || rising_to_falling) {
            continue;
        }
        let x = safe_newton(|x| (potential.d1(x), potential.d2(x)), xs[i], xs[i + 1], 1e-15 * scale, 1e-14)?;
        let c = Critical { x, v: potential.value(x) };
        if falling_to_rising {
            minima.push(c);
        } else {
            maxima.push(c);
        }
    }
    match minima.len() {
        0 | 1 => return Err(Error::FewerThanTwoMinima { found: minima.len() }),
        2 => {}
        found => return Err(Error::TooManyMinima { found }),
    }
    let right = minima.pop().expect("two minima");
    let left = minima.pop().expect("two minima");
    let top = maxima
        .into_iter()
        .filter(|m| m.x > left.x && m.x < right.x)
        .max_by(|a, b| a.v.total_cmp(&b.v))
        .ok_or(Error::FewerThanTwoMinima { found: 1 })?;
    Ok((left, top, right))
}
