use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("malformed decimal numeral: {0}")]
    Parse(String),

    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),

    #[error("insufficient accuracy: have {have} bits, need {need}")]
    InsufficientAccuracy { have: u64, need: u64 },

    #[error("invalid checkpoint: {0}")]
    InvalidCheckpoint(String),

    #[error("split point m = {m} out of range for {n} digits")]
    SplitOutOfRange { n: usize, m: usize },

    #[error(
        "orbit did not converge after {iterations} iterations (log2 residual {log2_residual:.1})"
    )]
    NonConvergence {
        iterations: usize,
        log2_residual: f64,
    },

    #[error("orbit tail disagrees with predicted limit {odd_multiple}*pi")]
    ClassificationMismatch { odd_multiple: i64 },
}
