use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim}: cutoff must be at least 1")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "cutoff too small: discarded tail mass {tail:.3e} exceeds budget {budget:.1e} ({detail})"
    )]
    Truncation {
        tail: f64,
        budget: f64,
        detail: String,
    },

    #[error("numerical oracle failed: {0}")]
    OracleFailure(String),

    #[error("herald has zero probability (p = {probability:.3e})")]
    ZeroProbabilityHerald { probability: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("{0} is only defined for pure states")]
    UnsupportedForMixedState(&'static str),

    #[error("input state is not normalized (squared norm {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid herald pattern: {0}")]
    InvalidPattern(String),

    #[error("cannot parse ladder word {0:?}")]
    LadderParse(String),
}
