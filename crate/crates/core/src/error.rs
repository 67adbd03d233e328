use thiserror::Error;

/// Errors raised by the exact engine and the numeric cross-checker.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclotomic level {level} exceeds the configured cap {cap}")]
    LevelTooLarge { level: u32, cap: u32 },

    #[error("invalid cyclotomic level {0}")]
    InvalidLevel(u32),

    #[error("context mismatch: level {left} vs level {right}")]
    ContextMismatch { left: u32, right: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: u32, right: u32 },

    #[error("germ has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("truncation budget exceeded: need degree {needed}, cap is {cap}")]
    TruncationBudget { needed: u32, cap: u32 },

    #[error("component {component} vanishes identically up to degree {truncation}")]
    ZeroComponent { component: usize, truncation: u32 },

    #[error("dual-space dimension did not stabilize by degree {cap} (possibly non-isolated zero or truncation too low)")]
    NotStabilized { cap: u32 },

    #[error("zero is not isolated within resolution (checked up to truncation {truncation})")]
    NonIsolated { truncation: u32 },

    #[error(
        "result not certified: stabilized at {stabilized_at} but truncation cap {cap} reached"
    )]
    Untrusted { stabilized_at: u32, cap: u32 },

    #[error("Dold index P_{period} = {value} is not divisible by {period}")]
    Divisibility { period: u32, value: i64 },

    #[error("index consistency failed: {0}")]
    Inconsistent(String),

    #[error("linear part is not diagonal")]
    NonDiagonal,

    #[error("eigenvalue is not a root of unity: {0}")]
    NotRootOfUnity(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numeric verification failed: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
