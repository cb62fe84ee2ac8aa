use std::path::PathBuf;

use thiserror::Error;

/// One probe of the α search: the weight tried and the subset size it produced.
pub type Probe = (f64, usize);

#[derive(Debug, Error)]
pub enum QfsError {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("label column '{0}' not found")]
    MissingLabelColumn(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} index {index} out of range for size {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("problem with {n} variables exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("covariance matrix is not positive definite ({0})")]
    NotPositiveDefinite(&'static str),

    #[error(
        "no α produced a subset of size {k}: bracket closed between \
         α={lower_alpha} (k'={lower_k}) and α={upper_alpha} (k'={upper_k}) after {} probes",
        trace.len()
    )]
    UnreachableK {
        k: usize,
        lower_alpha: f64,
        lower_k: usize,
        upper_alpha: f64,
        upper_k: usize,
        trace: Vec<Probe>,
    },

    #[error(
        "subset size decreased from {k_before} at α={alpha_before} to {k_after} at α={alpha_after} \
         (solver: {solver}); retry with more shots or the exhaustive solver"
    )]
    NonMonotone {
        alpha_before: f64,
        k_before: usize,
        alpha_after: f64,
        k_after: usize,
        solver: String,
        trace: Vec<Probe>,
    },
}

impl QfsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QfsError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = QfsError> = std::result::Result<T, E>;
