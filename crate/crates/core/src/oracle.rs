//! Finite-difference reference spectrum.
//!
//! The operator `-hbar^2/2m D^2 + V` is discretized with the three-point
//! second difference and Dirichlet walls. The two lowest eigenvalues are
//! isolated by Sturm-count bisection in double-double arithmetic, so that
//! doublets split by far less than the f64 spacing of their energies are
//! still resolved.
//!
//! The Sturm recurrence is carried in the form `q_i = c (1 + s_i)` with
//! `c = hbar^2 / (2 m h^2)`:
//!
//! ```text
//! s_1 = 1 + w_1 / c,    s_i = w_i / c + s_{i-1} / (1 + s_{i-1}),    w_i = V_i - E
//! ```
//!
//! which avoids the cancellation between the large diagonal `2c` and the
//! off-diagonal term, leaving errors relative to `|V - E|` instead of `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::dd::Dd;
use crate::numerics::quadrature::{integrate, QuadTolerance};
use crate::numerics::roots::brent;
use crate::potential::{DoubleWell, Potential, Side};

pub const DEFAULT_POINTS: usize = 8001;
pub const MIN_POINTS: usize = 64;

/// Required tail action between the upper doublet turning point and a wall.
const MIN_DECAY_LENGTHS: f64 = 5.0;
/// Automatic walls sit beyond the turning points of `E_bar + 10 hbar omega`.
const AUTO_QUANTA: f64 = 10.0;
const AUTO_MARGIN: f64 = 0.5;
/// Extra width on each side for the wall-sensitivity probe.
const PADDING: f64 = 0.25;
const MAX_PADDING_CHANGE: f64 = 1e-3;
const MAX_REFINEMENT_CHANGE: f64 = 0.1;
const EIGEN_RTOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 600;
// Relative resolution of double-double arithmetic.
const DD_EPS: f64 = 4.93e-32;

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_richardson() -> bool {
    true
}

/// Grid request. Missing walls are placed automatically from the well
/// landmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub x_min: Option<f64>,
    #[serde(default)]
    pub x_max: Option<f64>,
    /// Node count including both walls.
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_richardson")]
    pub richardson: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x_min: None, x_max: None, n_points: DEFAULT_POINTS, richardson: true }
    }
}

impl GridSpec {
    pub fn explicit(x_min: f64, x_max: f64, n_points: usize, richardson: bool) -> Self {
        GridSpec { x_min: Some(x_min), x_max: Some(x_max), n_points, richardson }
    }

    /// Concrete grid in the caller's coordinates. With a well at hand the
    /// walls are checked for tail margin, or placed automatically when absent.
    pub fn resolve(&self, well: Option<&DoubleWell>) -> Result<Grid> {
        match (self.x_min, self.x_max, well) {
            (Some(lo), Some(hi), well) => {
                let grid = Grid::new(lo, hi, self.n_points, self.richardson)?;
                if let Some(w) = well {
                    grid.check_margin(w)?;
                }
                Ok(grid)
            }
            (None, None, Some(w)) => Grid::automatic(w, self.n_points, self.richardson),
            (None, None, None) => Err(Error::Config("oracle_grid needs x_min and x_max for this potential".into())),
            _ => Err(Error::Config("oracle_grid: give both x_min and x_max or neither".into())),
        }
    }
}

/// A validated uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub richardson: bool,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, richardson: bool) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::Config(format!("oracle_grid: need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::Config(format!("oracle_grid: n_points must be at least {MIN_POINTS}, got {n_points}")));
        }
        Ok(Grid { x_min, x_max, n_points, richardson })
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Walls beyond the outer turning points of `E_bar + 10 hbar omega_max`,
    /// pushed out by half their distance from the nearer minimum. For the
    /// double oscillator a node is placed on the junction.
    pub fn automatic(well: &DoubleWell, n_points: usize, richardson: bool) -> Result<Self> {
        let a = well.analysis();
        let energy = a.mean_energy + AUTO_QUANTA * a.hbar * a.omega_left.max(a.omega_right);
        let mut edges = [0.0; 2];
        for (edge, side) in edges.iter_mut().zip([Side::Left, Side::Right]) {
            let x_out = outer_turning_point(well, side, energy)?;
            *edge = x_out + AUTO_MARGIN * (x_out - a.minimum(side));
        }
        let (p, q) = (well.to_caller(edges[0]), well.to_caller(edges[1]));
        let (mut lo, mut hi) = (p.min(q), p.max(q));
        if well.has_junction_cusp() {
            let h = (hi - lo) / (n_points - 1) as f64;
            lo = -(-lo / h).round() * h;
            hi = lo + (n_points - 1) as f64 * h;
        }
        Grid::new(lo, hi, n_points, richardson)
    }

    /// Tail action from the upper doublet turning points to each wall must
    /// reach [`MIN_DECAY_LENGTHS`].
    pub fn check_margin(&self, well: &DoubleWell) -> Result<()> {
        let a = well.analysis();
        let energy = a.mean_energy + a.eps.abs() / 2.0 + a.hbar * a.omega_left.max(a.omega_right);
        let (p, q) = (well.to_caller(self.x_min), well.to_caller(self.x_max));
        let walls = [p.min(q), p.max(q)];
        for (wall, side) in walls.into_iter().zip([Side::Left, Side::Right]) {
            let x_t = outer_turning_point(well, side, energy)?;
            let outward = if side == Side::Left { x_t - wall } else { wall - x_t };
            if outward <= 0.0 {
                return Err(Error::DomainTooSmall(format!(
                    "wall at {} lies inside the classically allowed region",
                    well.to_caller(wall)
                )));
            }
            let m = a.mass;
            let kappa = |x: f64| (2.0 * m * (well.value(x) - energy)).max(0.0).sqrt() / a.hbar;
            let decay = integrate(kappa, x_t.min(wall), x_t.max(wall), QuadTolerance::relative(1e-8))?.value;
            if decay < MIN_DECAY_LENGTHS {
                return Err(Error::DomainTooSmall(format!(
                    "only {decay:.2} decay lengths between turning point {} and wall {}",
                    well.to_caller(x_t),
                    well.to_caller(wall)
                )));
            }
        }
        Ok(())
    }

    /// Same walls, half the spacing.
    pub fn refined(&self) -> Grid {
        Grid { n_points: 2 * self.n_points - 1, ..*self }
    }

    /// Same spacing, walls moved out by a quarter of the width on each side.
    pub fn padded(&self) -> Grid {
        let h = self.step();
        let extra = (PADDING * (self.n_points - 1) as f64).ceil() as usize;
        Grid {
            x_min: self.x_min - extra as f64 * h,
            x_max: self.x_max + extra as f64 * h,
            n_points: self.n_points + 2 * extra,
            richardson: self.richardson,
        }
    }
}

fn outer_turning_point(well: &DoubleWell, side: Side, energy: f64) -> Result<f64> {
    let a = well.analysis();
    let start = a.minimum(side);
    let dir = if side == Side::Left { -1.0 } else { 1.0 };
    let mut step = 0.5 * (a.right_min - a.left_min).abs();
    let mut inner = start;
    for _ in 0..200 {
        let x = start + dir * step;
        if well.value(x) >= energy {
            return brent(|y| well.value(y) - energy, inner, x, 0.0, 1e-14);
        }
        inner = x;
        step *= 2.0;
    }
    Err(Error::InvalidSpec(format!("potential does not confine energy {energy} on the {side:?} side")))
}

/// Lowest two levels on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridLevels {
    pub n_points: usize,
    pub step: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    pub splitting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    /// `E1 - E0`, formed before rounding to f64.
    pub splitting: f64,
    /// A third of the change in the splitting under grid halving; absent
    /// without Richardson extrapolation.
    pub est_error: Option<f64>,
    pub grid: Grid,
    /// Per-grid levels, coarse first.
    pub grids: Vec<GridLevels>,
}

impl Spectrum {
    /// Energies measured from `offset`.
    pub fn shifted(&self, offset: f64) -> Spectrum {
        let mut s = self.clone();
        s.e0 -= offset;
        s.e1 -= offset;
        for g in &mut s.grids {
            g.e0 -= offset;
            g.e1 -= offset;
        }
        s
    }
}

struct Discretized {
    /// `V_i / c` at the interior nodes.
    scaled: Vec<Dd>,
    inv_c: Dd,
    v_min: Dd,
    v_max: Dd,
    c: Dd,
}

impl Discretized {
    fn new(potential: &Potential, grid: &Grid) -> Self {
        let consts = potential.consts();
        let h = (Dd::from(grid.x_max) - Dd::from(grid.x_min)) / Dd::from((grid.n_points - 1) as f64);
        let c = Dd::from(consts.hbar).sqr() / (h.sqr().mul_f64(2.0 * consts.mass));
        let inv_c = Dd::ONE / c;
        let values: Vec<Dd> =
            (1..grid.n_points - 1).map(|i| potential.value_in(Dd::from(grid.x_min) + h.mul_f64(i as f64))).collect();
        let v_min = values.iter().copied().fold(values[0], |m, v| if v < m { v } else { m });
        let v_max = values.iter().copied().fold(values[0], |m, v| if v > m { v } else { m });
        Discretized { scaled: values.iter().map(|v| *v * inv_c).collect(), inv_c, v_min, v_max, c }
    }

    /// Number of eigenvalues below `energy`.
    fn count_below(&self, energy: Dd) -> usize {
        let shift = energy * self.inv_c;
        let mut count = 0;
        let mut s = Dd::ZERO;
        for (i, a) in self.scaled.iter().enumerate() {
            let w = *a - shift;
            s = if i == 0 { w + Dd::ONE } else { w + s / (Dd::ONE + s) };
            let pivot = Dd::ONE + s;
            if pivot.is_sign_negative() {
                count += 1;
            } else if pivot == Dd::ZERO {
                s = Dd::new(-1.0, f64::MIN_POSITIVE);
            }
        }
        count
    }

    fn lowest_two(&self) -> Result<(Dd, Dd)> {
        let lo = self.v_min;
        let hi = self.v_max + self.c.mul_f64(4.0);
        let mut ground = (lo, hi);
        let mut excited = (lo, hi);
        let mid = |b: (Dd, Dd)| (b.0 + b.1).mul_f64(0.5);
        for _ in 0..MAX_BISECTIONS {
            let scale = mid(excited).abs().to_f64().max(mid(ground).abs().to_f64());
            let floor = 8.0 * DD_EPS * scale;
            let gap = (excited.0 - ground.1).to_f64();
            let target = floor.max(if gap > 0.0 { EIGEN_RTOL * gap.min(scale) } else { 0.0 });
            let open_ground = (ground.1 - ground.0).to_f64() > target;
            let open_excited = (excited.1 - excited.0).to_f64() > target;
            if !open_ground && !open_excited {
                break;
            }
            if ground == excited {
                let m = mid(ground);
                match self.count_below(m) {
                    0 => {
                        ground.0 = m;
                        excited.0 = m;
                    }
                    1 => {
                        ground.1 = m;
                        excited.0 = m;
                    }
                    _ => {
                        ground.1 = m;
                        excited.1 = m;
                    }
                }
                continue;
            }
            if open_ground {
                let m = mid(ground);
                if self.count_below(m) >= 1 {
                    ground.1 = m;
                } else {
                    ground.0 = m;
                }
            }
            if open_excited {
                let m = mid(excited);
                if self.count_below(m) >= 2 {
                    excited.1 = m;
                } else {
                    excited.0 = m;
                }
            }
        }
        let (e0, e1) = (mid(ground), mid(excited));
        if !(excited.0 > ground.1) {
            return Err(Error::RootNonConvergence { iterations: MAX_BISECTIONS });
        }
        Ok((e0, e1))
    }
}

fn levels(potential: &Potential, grid: &Grid) -> Result<(Dd, Dd)> {
    Discretized::new(potential, grid).lowest_two()
}

fn summary(grid: &Grid, (e0, e1): (Dd, Dd)) -> GridLevels {
    GridLevels {
        n_points: grid.n_points,
        step: grid.step(),
        e0: e0.to_f64(),
        e1: e1.to_f64(),
        splitting: (e1 - e0).to_f64(),
    }
}

/// Lowest two eigenvalues of the discretized operator, in the caller's
/// energy scale.
///
/// Always probes the walls by repeating the computation on a grid padded by
/// a quarter of its width; a splitting change above `1e-3` relative is
/// reported as [`Error::DomainTooSmall`]. With Richardson enabled the grid
/// is halved, a change above 10% is [`Error::GridTooCoarse`], and the
/// `O(h^2)` extrapolation is returned.
pub fn eigen_lowest_two(potential: &Potential, grid: &Grid) -> Result<Spectrum> {
    let padded = grid.padded();
    let ((base, padded_levels), fine) = rayon::join(
        || rayon::join(|| levels(potential, grid), || levels(potential, &padded)),
        || grid.richardson.then(|| levels(potential, &grid.refined())),
    );
    let base = base?;
    let padded_levels = padded_levels?;
    let split = (base.1 - base.0).to_f64();
    let padded_split = (padded_levels.1 - padded_levels.0).to_f64();
    let wall_change = ((padded_split - split) / split).abs();
    if wall_change > MAX_PADDING_CHANGE {
        return Err(Error::DomainTooSmall(format!(
            "splitting moved by {wall_change:.2e} relative when the walls were pushed out"
        )));
    }
    let coarse = summary(grid, base);
    let Some(fine) = fine.transpose()? else {
        return Ok(Spectrum {
            e0: coarse.e0,
            e1: coarse.e1,
            splitting: coarse.splitting,
            est_error: None,
            grid: *grid,
            grids: vec![coarse],
        });
    };
    let fine_split = fine.1 - fine.0;
    let change = ((fine_split - (base.1 - base.0)) / fine_split).to_f64();
    if change.abs() > MAX_REFINEMENT_CHANGE {
        return Err(Error::GridTooCoarse { relative_change: change.abs() });
    }
    let third = Dd::ONE / Dd::from(3.0);
    let extrapolate = |f: Dd, c: Dd| (f.mul_f64(4.0) - c) * third;
    let e0 = extrapolate(fine.0, base.0);
    let e1 = extrapolate(fine.1, base.1);
    let est_error = ((fine_split - (base.1 - base.0)) * third).abs().to_f64();
    Ok(Spectrum {
        e0: e0.to_f64(),
        e1: e1.to_f64(),
        splitting: (e1 - e0).to_f64(),
        est_error: Some(est_error),
        grid: *grid,
        grids: vec![coarse, summary(&grid.refined(), fine)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::gamow_integral;
    use crate::potential::{PhysConstants, PotentialSpec};
    use crate::splitting::delta_first_order;

    fn harmonic() -> Potential {
        Potential::new(PotentialSpec::Polynomial { coeffs: vec![0.0, 0.0, 0.5] }, PhysConstants::default()).unwrap()
    }

    #[test]
    fn harmonic_levels() {
        let grid = Grid::new(-10.0, 10.0, 2001, true).unwrap();
        let s = eigen_lowest_two(&harmonic(), &grid).unwrap();
        assert!((s.e0 - 0.5).abs() < 1e-8, "{}", s.e0);
        assert!((s.e1 - 1.5).abs() < 1e-8, "{}", s.e1);
        assert!(s.est_error.unwrap() < 1e-4);
        assert_eq!(s.grids.len(), 2);
    }

    #[test]
    fn second_order_convergence() {
        let errs: Vec<f64> = [201, 401, 801, 1601]
            .iter()
            .map(|&n| {
                let grid = Grid::new(-10.0, 10.0, n, false).unwrap();
                eigen_lowest_two(&harmonic(), &grid).unwrap().e0 - 0.5
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.05, "order {order}");
        }
    }

    #[test]
    fn ground_level_rises_toward_the_limit() {
        // The three-point Laplacian underestimates kinetic energy, so the
        // discrete ground level approaches the exact one from below.
        let mut prev = f64::NEG_INFINITY;
        for n in [101, 201, 401, 801] {
            let grid = Grid::new(-8.0, 8.0, n, false).unwrap();
            let e0 = eigen_lowest_two(&harmonic(), &grid).unwrap().e0;
            assert!(e0 > prev && e0 < 0.5);
            prev = e0;
        }
    }

    #[test]
    fn sturm_count_matches_known_levels() {
        let grid = Grid::new(-10.0, 10.0, 801, false).unwrap();
        let d = Discretized::new(&harmonic(), &grid);
        for (e, n) in [(0.3, 0), (0.9, 1), (2.2, 2), (4.2, 4), (9.9, 10)] {
            assert_eq!(d.count_below(Dd::from(e)), n, "E = {e}");
        }
    }

    #[test]
    fn quartic_splitting_near_semiclassical() {
        let spec = PotentialSpec::BiasedQuartic { alpha: 100.0, a: 1.0, beta: 0.0 };
        let well = DoubleWell::from_spec(spec, PhysConstants::default()).unwrap();
        let grid = GridSpec { n_points: 2001, ..GridSpec::default() }.resolve(Some(&well)).unwrap();
        let s = eigen_lowest_two(well.potential(), &grid).unwrap();
        let p = well.analysis();
        let delta = delta_first_order(p, gamow_integral(&well, p.mean_energy).unwrap());
        assert!(((delta - s.splitting) / s.splitting).abs() < 0.1, "{delta} vs {}", s.splitting);
        assert!(s.e0 > p.zero_shift);
    }

    #[test]
    fn resolves_splitting_below_f64_spacing() {
        // Splitting near 1e-20 on levels of order 10.
        let spec = PotentialSpec::BiasedQuartic { alpha: 300.0, a: 1.0, beta: 0.0 };
        let well = DoubleWell::from_spec(spec, PhysConstants::default()).unwrap();
        let grid = GridSpec { n_points: 1001, richardson: false, ..GridSpec::default() }.resolve(Some(&well)).unwrap();
        let s = eigen_lowest_two(well.potential(), &grid).unwrap();
        assert!(s.splitting > 0.0 && s.splitting < 1e-12 * s.e0, "{s:?}");
        let p = well.analysis();
        let delta = delta_first_order(p, gamow_integral(&well, p.mean_energy).unwrap());
        assert!((s.splitting / delta).ln().abs() < 0.5, "{} vs {delta}", s.splitting);
    }

    #[test]
    fn automatic_grid_puts_node_on_cusp() {
        let spec = PotentialSpec::DoubleOscillator { omega_left: 1.0, omega_right: 1.3, tilde_eps: 0.1, barrier: 10.0 };
        let well = DoubleWell::from_spec(spec, PhysConstants::default()).unwrap();
        let grid = Grid::automatic(&well, 1001, true).unwrap();
        let k = -grid.x_min / grid.step();
        assert!((k - k.round()).abs() < 1e-9);
        assert!(grid.x_min < well.analysis().left_min && grid.x_max > well.analysis().right_min);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(matches!(Grid::new(1.0, 1.0, 100, true), Err(Error::Config(_))));
        assert!(matches!(Grid::new(-1.0, 1.0, 63, true), Err(Error::Config(_))));
        let half = GridSpec { x_min: Some(-1.0), ..GridSpec::default() };
        assert!(matches!(half.resolve(None), Err(Error::Config(_))));
        assert!(matches!(GridSpec::default().resolve(None), Err(Error::Config(_))));
    }

    #[test]
    fn narrow_walls_detected() {
        let spec = PotentialSpec::BiasedQuartic { alpha: 30.0, a: 1.0, beta: 0.0 };
        let well = DoubleWell::from_spec(spec, PhysConstants::default()).unwrap();
        let err = GridSpec::explicit(-1.2, 1.2, 401, false).resolve(Some(&well)).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall(_)), "{err:?}");
        // Without landmarks only the padding probe can notice.
        let grid = Grid::new(-1.5, 1.5, 401, false).unwrap();
        let err = eigen_lowest_two(&harmonic(), &grid).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall(_)), "{err:?}");
    }

    #[test]
    fn coarse_grid_detected() {
        let spec = PotentialSpec::BiasedQuartic { alpha: 200.0, a: 1.0, beta: 0.0 };
        let well = DoubleWell::from_spec(spec, PhysConstants::default()).unwrap();
        let grid = Grid::automatic(&well, 64, true).unwrap();
        let err = eigen_lowest_two(well.potential(), &grid).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { .. }), "{err:?}");
    }

    #[test]
    fn shifted_moves_all_energies() {
        let grid = Grid::new(-10.0, 10.0, 401, true).unwrap();
        let s = eigen_lowest_two(&harmonic(), &grid).unwrap();
        let t = s.shifted(0.25);
        assert_eq!(t.e0, s.e0 - 0.25);
        assert_eq!(t.grids[1].e1, s.grids[1].e1 - 0.25);
        assert_eq!(t.splitting, s.splitting);
    }
}
