//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("binomial domain violated: k = {k} > n = {n}")]
    BinomialDomain { n: u64, k: u64 },

    #[error("required truncation dimension {required} exceeds the cap {cap}")]
    DimCapExceeded { required: usize, cap: usize },

    #[error("matrix is not Hermitian: max deviation {dev:.3e}")]
    NotHermitian { dev: f64 },

    #[error("diagonal element {value:.3e} at n = {n} is below the clipping threshold")]
    NegativeDiagonal { n: usize, value: f64 },

    #[error("truncated state loses too much mass: norm/trace = {value}")]
    Truncated { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal cross-check failed: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
