use thiserror::Error;

/// Errors produced by the bound, polynomial, and geometry routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polynomial family: {0}")]
    InvalidFamily(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("method {method} does not apply: {reason}")]
    Inapplicable {
        method: &'static str,
        reason: String,
    },

    #[error("P_0 has no zero")]
    NoZero,

    #[error("no sign change bracketing {what} on [{lo}, {hi}]")]
    BracketFailure { what: String, lo: f64, hi: f64 },

    #[error("quadrature exact to degree {have}, need {need}")]
    QuadratureDegree { have: usize, need: usize },

    #[error("no feasible multi-index with entries <= {budget} for t = {t}")]
    Infeasible { t: f64, budget: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("solver left the sandwich g <= value <= f at t = {t}: {value} not in [{lower}, {upper}]")]
    SandwichViolation {
        t: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
