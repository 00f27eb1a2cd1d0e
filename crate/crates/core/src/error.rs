use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chain length must be at least 3, got {0}")]
    ChainTooShort(usize),
    #[error("integer momentum grid needs odd N, got N = {0}")]
    SectorMismatch(usize),
    #[error("coupling must be finite and non-negative, got {0}")]
    NegativeCoupling(f64),
    #[error("time must be finite and non-negative, got {0}")]
    NegativeTime(f64),
    #[error("invalid time grid: {0}")]
    BadGrid(String),
    #[error("series too short: {0}")]
    SeriesTooShort(String),
    #[error("no local minimum of the rate function inside the series span")]
    NoMinimum,
    #[error("exact diagonalization limited to N <= {max}, got N = {n}")]
    SystemTooLarge { n: usize, max: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
