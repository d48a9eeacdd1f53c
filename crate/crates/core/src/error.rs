use thiserror::Error;

/// Errors produced by the numerical routines.
///
/// Every undefined case surfaces here instead of as a NaN.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight is not integrable near zero: {0}")]
    NonIntegrableNearZero(String),

    #[error("inverted interval: a = {a} > b = {b}")]
    InvertedInterval { a: f64, b: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("function has a non-zero constant right extension and is not nonincreasing")]
    NonRearrangeable,

    #[error("U vanishes at t = {0}")]
    DegenerateU(f64),

    #[error("sigma vanishes at t = {0}")]
    DegenerateSigma(f64),

    #[error("target is not quasiconcave (c1 = {c1}, c2 = {c2})")]
    NotQuasiconcave { c1: f64, c2: f64 },

    #[error("representation fit failed: sup log ratio {achieved} exceeds bound {bound}")]
    FitFailed { achieved: f64, bound: f64 },

    #[error("branch mismatch: {0}")]
    BranchMismatch(String),

    #[error("degenerate problem: right-hand side vanishes for every trial")]
    DegenerateProblem,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
