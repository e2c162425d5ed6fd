//! The four user commands as library calls returning report documents.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, SweepMode, SweepSpec, ValidityThresholds};
use super::fit::{fit_log_quadratic, FitResult};
use crate::action::{
    action_at, asymptotic_action, parabolic_diagnostic, ActionResult, ActionTolerance, AsymptoticAction,
    ParabolicDiagnostic, MAX_LAMBDA,
};
use crate::error::{Error, Result};
use crate::oracle::{eigen_lowest_two, GridSpec, Spectrum};
use crate::potential::{DoubleWell, Potential, WellAnalysis};
use crate::splitting::spectral::K;
use crate::splitting::{delta_zeroth_order, level_splitting, SplittingResult};

/// Machine-readable validity warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarnFlag {
    /// `|eps| / hbar omega_L` above its threshold.
    EpsOverHw,
    /// `exp(-I)` above its threshold.
    GamowFactor,
    /// Finite differences across the double-oscillator kink.
    JunctionCusp,
    /// A transcendental root left the doublet region.
    TranscendentalUnresolved,
}

impl WarnFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            WarnFlag::EpsOverHw => "eps_over_hw",
            WarnFlag::GamowFactor => "gamow_factor",
            WarnFlag::JunctionCusp => "junction_cusp",
            WarnFlag::TranscendentalUnresolved => "transcendental_unresolved",
        }
    }
}

pub fn validity_flags(params: &WellAnalysis, action: f64, limits: &ValidityThresholds) -> Vec<WarnFlag> {
    let mut flags = Vec::new();
    if params.eps.abs() / params.quantum_left() > limits.max_eps_over_hw {
        flags.push(WarnFlag::EpsOverHw);
    }
    if (-action).exp() > limits.max_gamow {
        flags.push(WarnFlag::GamowFactor);
    }
    flags
}

fn splitting_flags(s: &SplittingResult) -> Vec<WarnFlag> {
    if s.transcendental.is_none() {
        vec![WarnFlag::TranscendentalUnresolved]
    } else {
        Vec::new()
    }
}

fn merge_flags(into: &mut Vec<WarnFlag>, more: &[WarnFlag]) {
    into.extend_from_slice(more);
    into.sort();
    into.dedup();
}

fn build_well(cfg: &RunConfig) -> Result<DoubleWell> {
    let potential = Potential::new(cfg.potential.clone(), cfg.constants)?;
    let well = DoubleWell::analyze(potential, &cfg.analysis)?;
    well.check_barrier()?;
    Ok(well)
}

/// Oracle spectrum of `well` with energies measured from its left minimum.
fn well_spectrum(well: &DoubleWell, grid: &GridSpec) -> Result<Spectrum> {
    let resolved = grid.resolve(Some(well))?;
    Ok(eigen_lowest_two(well.potential(), &resolved)?.shifted(well.analysis().zero_shift))
}

fn oracle_flags(well: &DoubleWell) -> Vec<WarnFlag> {
    if well.has_junction_cusp() {
        vec![WarnFlag::JunctionCusp]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub well: WellAnalysis,
    pub action: ActionResult,
    pub splitting: SplittingResult,
    pub parabolic: ParabolicDiagnostic,
    /// Small-energy expansion of the action, when the energy is low enough.
    pub asymptotic: Option<AsymptoticAction>,
    pub oracle: Option<Spectrum>,
    /// Closed-form splitting over the oracle splitting.
    pub wkb_over_oracle: Option<f64>,
    pub warnings: Vec<WarnFlag>,
}

pub fn analyze(cfg: &RunConfig) -> Result<AnalysisReport> {
    let tol = cfg.tolerances.action_tolerance();
    let well = build_well(cfg)?;
    let params = *well.analysis();
    let action = action_at(&well, params.mean_energy, &tol)?;
    let splitting = SplittingResult::compute(&well, &params, &action)?;
    let mut warnings = validity_flags(&params, action.action, &cfg.validity_thresholds);
    merge_flags(&mut warnings, &splitting_flags(&splitting));
    let oracle = match &cfg.oracle_grid {
        Some(grid) => {
            merge_flags(&mut warnings, &oracle_flags(&well));
            Some(well_spectrum(&well, grid)?)
        }
        None => None,
    };
    Ok(AnalysisReport {
        well: params,
        parabolic: parabolic_diagnostic(&well, &action),
        asymptotic: asymptotic_action(&well, MAX_LAMBDA).ok(),
        wkb_over_oracle: oracle.as_ref().map(|s| splitting.delta_e / s.splitting),
        oracle,
        action,
        splitting,
        warnings,
    })
}

/// One line of the fixed CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub tilde_eps: f64,
    pub eps: f64,
    #[serde(rename = "E_bar")]
    pub mean_energy: f64,
    #[serde(rename = "I_bar")]
    pub action: f64,
    #[serde(rename = "I_slope")]
    pub slope: f64,
    pub delta: f64,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    #[serde(rename = "E_plus")]
    pub e_lower: f64,
    #[serde(rename = "E_minus")]
    pub e_upper: f64,
    #[serde(rename = "dE_trans_plus")]
    pub transcendental_lower: Option<f64>,
    #[serde(rename = "dE_trans_minus")]
    pub transcendental_upper: Option<f64>,
    #[serde(rename = "oracle_E0")]
    pub oracle_e0: Option<f64>,
    #[serde(rename = "oracle_E1")]
    pub oracle_e1: Option<f64>,
    pub oracle_split: Option<f64>,
    pub warn_flags: Vec<WarnFlag>,
}

impl ReportRow {
    pub fn new(params: &WellAnalysis, s: &SplittingResult, oracle: Option<&Spectrum>, warn_flags: Vec<WarnFlag>) -> Self {
        ReportRow {
            tilde_eps: params.tilde_eps,
            eps: params.eps,
            mean_energy: params.mean_energy,
            action: s.action,
            slope: s.slope,
            delta: s.delta,
            delta_e: s.delta_e,
            e_lower: s.e_lower,
            e_upper: s.e_upper,
            transcendental_lower: s.transcendental.map(|t| t.shift_lower),
            transcendental_upper: s.transcendental.map(|t| t.shift_upper),
            oracle_e0: oracle.map(|o| o.e0),
            oracle_e1: oracle.map(|o| o.e1),
            oracle_split: oracle.map(|o| o.splitting),
            warn_flags,
        }
    }
}

impl AnalysisReport {
    pub fn row(&self) -> ReportRow {
        ReportRow::new(&self.well, &self.splitting, self.oracle.as_ref(), self.warnings.clone())
    }
}

/// A configuration at one bias offset: the potential used for the action,
/// the landmarks entering the prefactor, and the potential for the oracle.
struct BiasPoint {
    action_well: DoubleWell,
    params: WellAnalysis,
}

fn bias_point(base: &DoubleWell, cfg: &RunConfig, mode: SweepMode, tilde_eps: f64) -> Result<BiasPoint> {
    match mode {
        SweepMode::Formal => Ok(BiasPoint { action_well: base.clone(), params: base.analysis().rebiased(tilde_eps) }),
        SweepMode::Physical => {
            let well = base.physically_rebiased(tilde_eps, &cfg.analysis)?;
            well.check_barrier()?;
            let params = *well.analysis();
            Ok(BiasPoint { action_well: well, params })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub mode: SweepMode,
    pub rows: Vec<ReportRow>,
    pub fit: FitResult,
    /// `d ln delta / d tilde_eps` at zero offset from the action slope and
    /// the first-order prefactor.
    pub c1_analytic: f64,
    pub c1_relative_error: f64,
    /// `c1 hbar omega_L`, the linear coefficient in oscillator units.
    pub c1_quantum_units: f64,
    /// `V0 / hbar omega_L` of the base potential.
    pub barrier_quanta: f64,
    pub warnings: Vec<WarnFlag>,
}

/// `(k/4)(1/hbar omega_L)(omega_R - omega_L)/omega_R - I'(E_bar)/2`.
pub fn analytic_c1(params: &WellAnalysis, slope: f64) -> f64 {
    let p = params;
    K / 4.0 / p.quantum_left() * ((p.omega_right - p.omega_left) / p.omega_right) - slope / 2.0
}

fn sweep_block(cfg: &RunConfig) -> Result<SweepSpec> {
    let spec = cfg.sweep.ok_or_else(|| Error::Config("sweep block missing".into()))?;
    if spec.steps < super::fit::MIN_FIT_POINTS {
        return Err(Error::FitIllConditioned(format!("sweep needs at least 5 steps, got {}", spec.steps)));
    }
    if spec.from == spec.to {
        return Err(Error::FitIllConditioned("sweep range has zero width".into()));
    }
    Ok(spec)
}

/// Points are evaluated in parallel on the current rayon pool and returned
/// in parameter order.
pub fn sweep(cfg: &RunConfig) -> Result<SweepReport> {
    let spec = sweep_block(cfg)?;
    let tol = cfg.tolerances.action_tolerance();
    let base = build_well(cfg)?;
    let values = spec.values();
    let rows = values
        .par_iter()
        .map(|&te| sweep_row(&base, cfg, spec.mode, te, &tol))
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let fit = fit_log_quadratic(&values, &deltas)?;
    let origin = bias_point(&base, cfg, spec.mode, 0.0)?;
    let slope = action_at(&origin.action_well, origin.params.mean_energy, &tol)?.slope;
    let c1_analytic = analytic_c1(&origin.params, slope);
    let mut warnings = Vec::new();
    for r in &rows {
        merge_flags(&mut warnings, &r.warn_flags);
    }
    let a = base.analysis();
    Ok(SweepReport {
        mode: spec.mode,
        rows,
        c1_relative_error: ((fit.c1 - c1_analytic) / c1_analytic).abs(),
        c1_quantum_units: fit.c1 * a.quantum_left(),
        barrier_quanta: a.barrier_height / a.quantum_left(),
        fit,
        c1_analytic,
        warnings,
    })
}

fn sweep_row(base: &DoubleWell, cfg: &RunConfig, mode: SweepMode, te: f64, tol: &ActionTolerance) -> Result<ReportRow> {
    let point = bias_point(base, cfg, mode, te)?;
    let action = action_at(&point.action_well, point.params.mean_energy, tol)?;
    let splitting = SplittingResult::compute(&point.action_well, &point.params, &action)?;
    let mut flags = validity_flags(&point.params, action.action, &cfg.validity_thresholds);
    merge_flags(&mut flags, &splitting_flags(&splitting));
    let oracle = match &cfg.oracle_grid {
        Some(grid) => {
            let physical = match mode {
                SweepMode::Physical => point.action_well.clone(),
                SweepMode::Formal => base.physically_rebiased(te, &cfg.analysis)?,
            };
            merge_flags(&mut flags, &oracle_flags(&physical));
            Some(well_spectrum(&physical, grid)?)
        }
        None => None,
    };
    Ok(ReportRow::new(&point.params, &splitting, oracle.as_ref(), flags))
}

/// Where oracle energies are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyOrigin {
    /// The lower well's minimum, as in every other report.
    LeftMinimum,
    /// The potential's own zero, when it is not a double well.
    PotentialZero,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub energy_origin: EnergyOrigin,
    pub spectrum: Spectrum,
    pub warnings: Vec<WarnFlag>,
}

/// Reference spectrum. Potentials that are not double wells (a plain
/// oscillator, say) are accepted when the grid gives explicit walls.
pub fn oracle(cfg: &RunConfig) -> Result<OracleReport> {
    let grid = cfg.oracle_grid.ok_or_else(|| Error::Config("oracle_grid block missing".into()))?;
    let potential = Potential::new(cfg.potential.clone(), cfg.constants)?;
    match DoubleWell::analyze(potential.clone(), &cfg.analysis) {
        Ok(well) => {
            let tol = cfg.tolerances.action_tolerance();
            let mut warnings = oracle_flags(&well);
            if let Ok(action) = action_at(&well, well.analysis().mean_energy, &tol) {
                merge_flags(&mut warnings, &validity_flags(well.analysis(), action.action, &cfg.validity_thresholds));
            }
            Ok(OracleReport { energy_origin: EnergyOrigin::LeftMinimum, spectrum: well_spectrum(&well, &grid)?, warnings })
        }
        Err(e) if e.exit_code() == 3 && grid.x_min.is_some() && grid.x_max.is_some() => {
            let resolved = grid.resolve(None)?;
            Ok(OracleReport {
                energy_origin: EnergyOrigin::PotentialZero,
                spectrum: eigen_lowest_two(&potential, &resolved)?,
                warnings: Vec::new(),
            })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Amplitude without the bias correction of the prefactor.
    ZerothOrder,
    FirstOrder,
    Transcendental,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ZerothOrder => "zeroth_order",
            Method::FirstOrder => "first_order",
            Method::Transcendental => "transcendental",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: Method,
    /// Absent when the method has no result, as for an unresolved
    /// transcendental root.
    #[serde(rename = "delta_E")]
    pub delta_e: Option<f64>,
    /// `(delta_E - oracle) / oracle`.
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub well: WellAnalysis,
    pub rows: Vec<CompareRow>,
    pub oracle: Spectrum,
    pub warnings: Vec<WarnFlag>,
}

impl CompareReport {
    pub fn row(&self, method: Method) -> CompareRow {
        *self.rows.iter().find(|r| r.method == method).expect("every method has a row")
    }
}

pub fn compare(cfg: &RunConfig) -> Result<CompareReport> {
    let grid = cfg.oracle_grid.ok_or_else(|| Error::Config("oracle_grid block missing".into()))?;
    let tol = cfg.tolerances.action_tolerance();
    let well = build_well(cfg)?;
    let params = *well.analysis();
    let action = action_at(&well, params.mean_energy, &tol)?;
    let splitting = SplittingResult::compute(&well, &params, &action)?;
    let oracle = well_spectrum(&well, &grid)?;
    let reference = oracle.splitting;
    let row = |method, delta_e: Option<f64>| CompareRow {
        method,
        delta_e,
        rel_error: delta_e.map(|d| (d - reference) / reference),
    };
    let rows = vec![
        row(Method::ZerothOrder, Some(level_splitting(params.eps, delta_zeroth_order(&params, action.action)))),
        row(Method::FirstOrder, Some(splitting.delta_e)),
        row(Method::Transcendental, splitting.transcendental.map(|t| t.splitting)),
        row(Method::Oracle, Some(reference)),
    ];
    let mut warnings = validity_flags(&params, action.action, &cfg.validity_thresholds);
    merge_flags(&mut warnings, &splitting_flags(&splitting));
    merge_flags(&mut warnings, &oracle_flags(&well));
    Ok(CompareReport { well: params, rows, oracle, warnings })
}
