use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("utility is not invertible: {0}")]
    NotInvertible(String),

    #[error("distribution cannot be discretized: {0}")]
    NonDiscretizable(String),

    #[error("constraint set is infeasible: {0}")]
    Infeasible(String),

    #[error("solver did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NotConverged { iterations: usize, max_residual: f64 },

    #[error("no closed form is known for constraint set {0}")]
    UnknownConstraintSet(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("samples use more than one captime ({first} and {other})")]
    MixedCaptimes { first: f64, other: f64 },

    #[error("no samples supplied")]
    EmptyInput,

    #[error("reports are not comparable: {0}")]
    IncomparableReports(String),

    #[error("quality {q} outside [{q0}, {q1}]")]
    QualityOutOfRange { q: f64, q0: f64, q1: f64 },

    #[error("no adversarial instance exists: {0}")]
    NoSuchInstance(String),

    #[error("run source failed after {completed} runs: {message}")]
    SourceFailure { completed: usize, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn bad(msg: impl Into<String>) -> Self {
        Error::BadParameters(msg.into())
    }
}
