use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A point violates the membership predicate of its model space, or
    /// belongs to a different space than the one it is used with.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scalar argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation that needs sample points received none.
    #[error("empty sample list")]
    EmptySamples,

    /// An iterative solver exhausted its budget without meeting its
    /// stopping rule. Never silent: carries what was being solved.
    #[error("solver failure in {what} after {iterations} iterations")]
    SolverFailure { what: String, iterations: usize },

    /// An anchor point was required to be fixed but is not.
    #[error("anchor is not a fixed point: d(Ty, y) = {residual:.3e}")]
    NotFixed { residual: f64 },

    /// The operation is only defined on a restricted class of spaces.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A gauge cannot be combined with the requested contraction modulus.
    #[error("gauge incompatible with tau: {0}")]
    GaugeIncompatible(String),

    /// The iterated-gauge tail sum did not converge within budget.
    #[error("gauge iterate series not numerically summable within budget")]
    NotSummable,

    /// Configuration file problem, with the offending line number.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("certification failed: {0}")]
    NotCertified(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
