use std::fmt;

use thiserror::Error;

/// Location and order of a pole of the secondary zeta function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PoleInfo {
    /// The pole is at this (odd) integer: 1 or -(2n-1).
    pub location: i64,
    /// 2 at s = 1, 1 elsewhere.
    pub order: u8,
}

impl fmt::Display for PoleInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.order == 2 { "double" } else { "simple" };
        write!(f, "{kind} pole at s={}", self.location)
    }
}

/// Failures while reading or writing a zero cache file.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported cache version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed entry on line {line}: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("digit count mismatch on line {line}: expected {expected}, found {found}")]
    DigitCount {
        line: usize,
        expected: u32,
        found: u32,
    },
    #[error("cache miss: file holds {have} digits, {want} requested")]
    InsufficientDigits { have: u32, want: u32 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Pole(PoleInfo),
    #[error("infeasible precision: {requested} working digits exceeds the cap of {cap}")]
    InfeasiblePrecision { requested: u32, cap: u32 },
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero certification failed: {0}")]
    Certification(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error(
        "singular-term asymptotic series stalls at 1e{min_term_log10:.1} above tolerance 1e{tolerance_log10:.1}; decrease a"
    )]
    AsymptoticFailure {
        min_term_log10: f64,
        tolerance_log10: f64,
    },
    #[error("no sign change bracketed near {0}")]
    NoBracket(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),
    #[error("series tail too large: {0}")]
    TailTooLarge(String),
    #[error("cache: {0}")]
    Cache(#[from] CacheError),
}

pub type Result<T> = std::result::Result<T, Error>;
