use thiserror::Error;

/// Errors raised by the series, solver and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("series with zero constant term has no reciprocal")]
    NonInvertibleSeries,

    #[error("coefficient index {index} outside 0..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("functional has a pole at the base point x = {base}")]
    PoleAtBase { base: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("need at least {needed} usable terms, got {got}")]
    InsufficientTerms { needed: usize, got: usize },

    #[error("argument {z} is below the branch point -1/e")]
    OutOfBranch { z: f64 },

    #[error("no root found in [{lo}, {hi}]")]
    NoRootInInterval { lo: f64, hi: f64 },

    #[error("root iteration stalled at x = {x} with residual {residual}")]
    ToleranceNotReached { x: f64, residual: f64 },

    #[error("exact backend cannot represent {0}")]
    InexactBackend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
