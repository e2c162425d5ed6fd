//! Run configuration documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::ActionTolerance;
use crate::error::{Error, Result};
use crate::numerics::quadrature::QuadTolerance;
use crate::oracle::GridSpec;
use crate::potential::{AnalysisOptions, PhysConstants, PotentialSpec};

/// Accepted value of the top-level `schema` field.
pub const SCHEMA: &str = "tunnelkit/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub constants: PhysConstants,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub oracle_grid: Option<GridSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub validity_thresholds: ValidityThresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    TildeEps,
}

/// How the bias is moved along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Keep the potential and its landmarks; only the offset entering the
    /// bias, the mean energy and the prefactor changes.
    #[default]
    Formal,
    /// Lift the right well by changing the potential itself.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    #[serde(default)]
    pub mode: SweepMode,
}

impl SweepSpec {
    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.from],
            n => (0..n).map(|i| self.from + (self.to - self.from) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Quadrature overrides. Unset entries keep the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub action_rel: Option<f64>,
    pub action_abs: Option<f64>,
    pub slope_rel: Option<f64>,
    pub max_intervals: Option<usize>,
}

impl Tolerances {
    pub fn action_tolerance(&self) -> ActionTolerance {
        let base = ActionTolerance::default();
        let apply = |q: QuadTolerance, rel: Option<f64>, abs: Option<f64>| QuadTolerance {
            rel: rel.unwrap_or(q.rel),
            abs: abs.unwrap_or(q.abs),
            max_intervals: self.max_intervals.unwrap_or(q.max_intervals),
        };
        ActionTolerance {
            action: apply(base.action, self.action_rel, self.action_abs),
            slope: apply(base.slope, self.slope_rel, None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidityThresholds {
    /// Largest `|eps| / hbar omega_L` before results are flagged.
    pub max_eps_over_hw: f64,
    /// Largest Gamow factor `exp(-I)` before results are flagged.
    pub max_gamow: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        ValidityThresholds { max_eps_over_hw: 0.2, max_gamow: 1e-2 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Config(format!("schema must be \"{SCHEMA}\", got \"{}\"", self.schema)));
        }
        self.potential.validate()?;
        self.constants.validate()?;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite")))
            }
        };
        if let Some(w) = self.analysis.window {
            finite("analysis.window", w[0])?;
            finite("analysis.window", w[1])?;
        }
        if let Some(g) = &self.oracle_grid {
            for v in [g.x_min, g.x_max].into_iter().flatten() {
                finite("oracle_grid bound", v)?;
            }
        }
        if let Some(s) = &self.sweep {
            finite("sweep.from", s.from)?;
            finite("sweep.to", s.to)?;
        }
        let t = &self.tolerances;
        for v in [t.action_rel, t.action_abs, t.slope_rel].into_iter().flatten() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("tolerances must be finite and non-negative, got {v}")));
            }
        }
        let v = &self.validity_thresholds;
        if !(v.max_eps_over_hw > 0.0 && v.max_eps_over_hw.is_finite() && v.max_gamow > 0.0 && v.max_gamow.is_finite()) {
            return Err(Error::Config("validity thresholds must be positive and finite".into()));
        }
        Ok(())
    }
}
