use thiserror::Error;

/// Errors raised by estimation, projection, inference and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("number of causes must be at least 2, got {0}")]
    BadK(usize),
    #[error("input contains no observations")]
    EmptyInput,
    #[error("observation {index}: time must be finite and > 0, got {time}")]
    NonPositiveTime { index: usize, time: f64 },
    #[error("observation {index}: cause code {code} outside 0..={k}")]
    CauseOutOfRange { index: usize, code: u32, k: usize },
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("empirical estimator requires uncensored data, found censored observations")]
    CensoringPresent,
    #[error("cause index {j} outside 1..={k}")]
    BadCauseIndex { j: usize, k: usize },
    #[error("cannot project an empty vector")]
    EmptyVector,
    #[error("CIF set is already restricted")]
    AlreadyRestricted,
    #[error("CIF set must be restricted")]
    NotRestricted,
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("risk set is empty at time {0}")]
    EmptyRiskSet(f64),
    #[error("bad covariance query: {0}")]
    BadQuery(String),
    #[error("confidence level must lie in (0, 1), got {0}")]
    BadLevel(f64),
    #[error("sub-test index j must satisfy 2 <= j <= {k}, got {j}")]
    BadJ { j: usize, k: usize },
    #[error("bad simulation config: {0}")]
    BadConfig(String),
    #[error("null-distribution study requires equal cause hazards")]
    NotNull,
    #[error("tie set of cause {cause} at t = {time} is a singleton")]
    TieSetSingleton { cause: usize, time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
