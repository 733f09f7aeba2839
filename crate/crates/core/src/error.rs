use thiserror::Error;

/// Errors produced by the solver, clustering and I/O layers.
#[derive(Debug, Error)]
pub enum LrrError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical failure on {rows}x{cols} matrix: {reason}")]
    Numerical {
        rows: usize,
        cols: usize,
        reason: String,
    },

    #[error("data is not in the span of the dictionary (relative residual {residual:.3e})")]
    Infeasible { residual: f64 },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LrrError>;

impl LrrError {
    pub(crate) fn numerical(shape: (usize, usize), reason: impl ToString) -> Self {
        LrrError::Numerical {
            rows: shape.0,
            cols: shape.1,
            reason: reason.to_string(),
        }
    }
}
