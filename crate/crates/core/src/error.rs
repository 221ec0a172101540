//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Record-level TLE parse failure. `line` is 1-based in the input text.
    #[error("TLE line {line}: {reason}")]
    Tle { line: usize, reason: String },

    /// Input contained no valid TLE records.
    #[error("no valid TLE records in input")]
    EmptyCatalog,

    #[error("config error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// A caller broke an interface contract (unsorted input, population
    /// mismatch, double mutation of the same id, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A risk record was read at a ranking epoch it was not refreshed for.
    #[error("stale risk record for object {id}: refreshed at epoch {last}, read at {epoch}")]
    StaleRecord { id: u64, last: u64, epoch: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
