use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidSpec(String),
    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("found {found} local minima in the scan window, need two")]
    FewerThanTwoMinima { found: usize },
    #[error("found {found} local minima in the scan window, need exactly two")]
    TooManyMinima { found: usize },
    #[error("minimum at x = {x} has non-positive curvature {curvature}")]
    NonConvexMinimum { x: f64, curvature: f64 },
    #[error("barrier top {barrier} does not exceed the reference energy {energy}")]
    DegenerateBarrier { barrier: f64, energy: f64 },
    #[error("energy {energy} is at or above the barrier top {barrier}")]
    EnergyAboveBarrier { energy: f64, barrier: f64 },
    #[error("energy {energy} is at or below the bottom {bottom} of the {side} well")]
    EnergyBelowWellBottom { energy: f64, bottom: f64, side: &'static str },
    #[error("lambda = {lambda} lies outside (0, {limit})")]
    LambdaOutOfRange { lambda: f64, limit: f64 },
    #[error("argument {arg} outside the supported range [{lo}, {hi}]")]
    OutOfSupportedRange { arg: f64, lo: f64, hi: f64 },
    #[error("argument {0} outside the function domain")]
    DomainError(f64),
    #[error("no sign change around the estimated root near {estimate}")]
    RootNotBracketed { estimate: f64 },

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} subintervals")]
    QuadratureNonConvergence { error: f64, intervals: usize },
    #[error("root finder did not converge after {iterations} iterations")]
    RootNonConvergence { iterations: usize },
    #[error("grid too coarse: refining changed the splitting by {relative_change:.3e} (relative)")]
    GridTooCoarse { relative_change: f64 },
    #[error("grid domain too small: {0}")]
    DomainTooSmall(String),
    #[error("bias fit is ill-conditioned: {0}")]
    FitIllConditioned(String),
}

impl Error {
    /// Process exit code: 2 configuration, 3 physical regime, 4 numerical convergence.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            InvalidSpec(_) | InvalidConstants(_) | Config(_) | DomainTooSmall(_)
            | FitIllConditioned(_) => 2,
            FewerThanTwoMinima { .. }
            | TooManyMinima { .. }
            | NonConvexMinimum { .. }
            | DegenerateBarrier { .. }
            | EnergyAboveBarrier { .. }
            | EnergyBelowWellBottom { .. }
            | LambdaOutOfRange { .. }
            | OutOfSupportedRange { .. }
            | DomainError(_)
            | RootNotBracketed { .. } => 3,
            QuadratureNonConvergence { .. } | RootNonConvergence { .. } | GridTooCoarse { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
