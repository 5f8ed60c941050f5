use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("kernel scale must be a finite positive number, got {0}")]
    InvalidScale(f64),

    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("decay envelope violated at {point:?}: |g| = {value:e} exceeds bound {bound:e}")]
    EnvelopeViolation {
        point: Vec<f64>,
        value: f64,
        bound: f64,
    },

    #[error("function is not certified integrable ({0})")]
    NotIntegrable(String),

    #[error("function is not bounded ({0})")]
    Unbounded(String),

    #[error("decay envelope is insufficient: {0}")]
    EnvelopeInsufficient(String),

    #[error("grid has {nodes} nodes, node budget is {budget}")]
    BudgetExceeded { nodes: u128, budget: u128 },

    #[error("tolerance {tol:e} unreachable at budget (best discretization estimate {best:e})")]
    ToleranceUnreachable { tol: f64, best: f64 },

    #[error("integrand returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("sequence member {index} violates its declared uniform bound {bound}")]
    UniformBoundViolated { index: usize, bound: f64 },

    #[error("malformed literal: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(arg: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            arg,
            reason: reason.into(),
        }
    }
}
