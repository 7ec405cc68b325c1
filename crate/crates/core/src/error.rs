//! Error and result types shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input's dimensions do not match what the operation expects.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An operation received an empty input it cannot define a value for.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A configuration is inconsistent (missing pieces, conflicting options).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Training produced a non-finite loss or parameter.
    #[error("training diverged at epoch {epoch}: {detail}")]
    Divergence { epoch: usize, detail: String },

    /// Column names or roles do not match the declared schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell could not be parsed; locations are 1-based data rows.
    #[error("parse error at row {row}, column '{column}': {detail}")]
    Parse {
        row: usize,
        column: String,
        detail: String,
    },

    /// A bundle file declares a format version this build does not read.
    #[error("unsupported bundle format version {found} (this build reads version {supported})")]
    FormatVersion { found: u64, supported: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
