use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("support violation: symbol {index} has positive probability but zero model probability")]
    SupportViolation { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("reducible chain: {0}")]
    Reducible(String),
    #[error("horizon too large: table would need {entries} entries (limit {limit})")]
    HorizonTooLarge { entries: u128, limit: u128 },
    #[error("symbol {symbol} at position {position} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange {
        symbol: usize,
        position: usize,
        alphabet: usize,
    },
    #[error("zero model probability at position {position}")]
    ZeroProbability { position: usize },
    #[error("degenerate outcome model: {0}")]
    DegenerateModel(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
