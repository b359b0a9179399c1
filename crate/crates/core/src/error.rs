use thiserror::Error;

/// Errors produced by the estimators, policies, environments and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm index {arm} out of range (num_arms = {num_arms})")]
    InvalidArm { arm: usize, num_arms: usize },

    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("time {time} is outside the horizon 1..={horizon}")]
    OutOfHorizon { time: u64, horizon: u64 },

    #[error("segment ({c},{d}) is not currently active")]
    NotActive { c: u64, d: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Domain(String),

    #[error("depth {depth} exceeds the enumeration limit {max}")]
    DepthTooLarge { depth: u32, max: u32 },

    #[error("length mismatch: {left} actions vs {right} percepts")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
