use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by image I/O, solvers and the decomposition pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("unsupported or corrupt format: {0}")]
    Format(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    /// The explicit scheme produced a non-finite energy, which means the
    /// time step is too large for the chosen epsilon.
    #[error("numerical instability at iteration {iteration}: non-finite energy (reduce step_size)")]
    Unstable { iteration: usize },

    #[error("solver failed at lambda = {lambda}: {source}")]
    Ladder {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },
}
