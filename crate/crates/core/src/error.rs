use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported weight family `{0}`")]
    UnsupportedFamily(String),

    #[error("quadrature did not converge (achieved relative error {achieved:.3e}, {panels} panels)")]
    QuadratureFailure { achieved: f64, panels: usize },

    #[error("no bracketing interval found: {0}")]
    BracketFailure(String),

    #[error("solver inconsistency at block {index}: relative residual {residual:.3e}")]
    SolverInconsistency { index: usize, residual: f64 },

    #[error("degenerate index range: {0}")]
    DegenerateRange(String),

    #[error("degenerate block: floor({prev}) == floor({next})")]
    DegenerateBlock { prev: f64, next: f64 },

    #[error("polynomial degree {degree} exceeds the covered range (max {max})")]
    InsufficientBlocks { degree: usize, max: usize },

    #[error("weight does not support this operation: {0}")]
    UnsupportedWeight(String),

    #[error("root solver failed: {0}")]
    SolverFailure(String),

    #[error("condition (b) violated at n = {n}: upper ratio {upper:.4} exceeds K = {k:.4}")]
    ConditionBViolation { n: usize, upper: f64, k: f64 },

    #[error("multiplier entry {index} has modulus {modulus} > 1")]
    InvalidMultiplier { index: usize, modulus: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
