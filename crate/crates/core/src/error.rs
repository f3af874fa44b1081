use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("kappa = {kappa} is below the threshold kappa* = 2*sqrt(n-1)/n = {kappa_star:.12} for n = {n}")]
    BelowThreshold { n: usize, kappa: f64, kappa_star: f64 },

    #[error("kappa = {kappa} > 1 is unsupported")]
    KappaAboveOne { kappa: f64 },

    #[error("evaluation at rho = {rho} is outside the profile domain [{min}, {max}]")]
    OutsideDomain { rho: f64, min: f64, max: f64 },

    #[error("evaluation at the singular pole (r = {r}) of a non-regular metric")]
    PoleEvaluation { r: f64 },

    #[error("quadrature over [{a}, {b}] did not reach tolerance after {panels} panels (error estimate {error:e})")]
    QuadratureDiverged { a: f64, b: f64, panels: usize, error: f64 },

    #[error("inversion for target {target} failed: bracket [{lo}, {hi}] maps to [{f_lo}, {f_hi}]")]
    InversionFailed {
        target: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("conformal conversion failed at r = {r}: {reason}")]
    IntegrationFailure { r: f64, reason: String },

    #[error("limit did not converge; samples {samples:?}")]
    LimitNotConverged { samples: Vec<(f64, f64)> },

    #[error("metric violates phi'(r) >= -2(1-kappa)/r at r = {r}: phi' = {dphi}, bound = {bound}")]
    ConformalBoundViolated { r: f64, dphi: f64, bound: f64 },

    #[error("test function does not vanish at the boundary: phi({rho}) = {value}")]
    NonzeroBoundary { rho: f64, value: f64 },

    #[error("eigen-solver failure: {0}")]
    Eigen(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("profile does not support this operation: {0}")]
    Unsupported(String),

    #[error("numerical cancellation: {0}")]
    Cancellation(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }
}
