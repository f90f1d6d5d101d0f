use thiserror::Error;

/// Errors raised by alignment, key extraction, simulation and file I/O.
#[derive(Debug, Error)]
pub enum SyncError {
    #[error("length error: {0}")]
    Length(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("index {index} out of bounds (limit {limit})")]
    Bounds { index: usize, limit: usize },

    #[error("no sample after index {start} exceeds the peak threshold {threshold}")]
    NoPeak { start: usize, threshold: f64 },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SyncError> = std::result::Result<T, E>;
