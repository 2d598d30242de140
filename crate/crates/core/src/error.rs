use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid loss vector: {0}")]
    InvalidLoss(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("divergence undefined: reference has zero mass at index {index} where the argument has mass")]
    UndefinedDivergence { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("linear update multiplier {value} at index {index} is not positive; learning rate too large")]
    NonPositiveMultiplier { index: usize, value: f64 },

    #[error("learner kind {0} needs the horizon at construction")]
    MissingHorizon(&'static str),

    #[error("replay has {available} rounds but the horizon is {needed}")]
    ReplayTooShort { needed: usize, available: usize },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("equilibrium solver failed: duality gap {gap:e} after perturbed resolve")]
    SolverFailure { gap: f64 },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
