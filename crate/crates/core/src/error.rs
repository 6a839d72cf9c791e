//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed ASCII grid header, naming the offending key.
    #[error("header key `{key}`: {reason}")]
    Header { key: String, reason: String },

    /// Wrong number of cells in an ASCII grid body.
    #[error("cell count mismatch: expected {expected}, found {found}")]
    CellCount { expected: usize, found: usize },

    /// Non-numeric cell token, with its zero-based grid position.
    #[error("bad cell token `{token}` at row {row}, col {col}")]
    Token {
        token: String,
        row: usize,
        col: usize,
    },

    /// Grid invariant violated (dimensions, cell count, integer cells).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids not aligned: {0}")]
    Alignment(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Flow-routing precondition violated (cycle in the direction graph).
    #[error("flow routing error: {0}")]
    Routing(String),

    #[error("delineation error: {0}")]
    Delineation(String),

    /// Unknown categorical code, with its zero-based grid position.
    #[error("unknown class code {code} at row {row}, col {col}")]
    ClassCode { code: f64, row: usize, col: usize },

    #[error("classification error: {0}")]
    Classification(String),

    /// Missing or inconsistent model configuration (e.g. absent zone raster).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}
