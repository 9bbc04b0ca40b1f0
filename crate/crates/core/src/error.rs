use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (first offending entry ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },

    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("invalid subset {indices:?} for order {order}: indices must be strictly increasing and in range")]
    InvalidSubset { indices: Vec<usize>, order: usize },

    #[error("singular {what}")]
    Singular { what: String },

    #[error("matrix is not positive definite (pivot {pivot} is negative)")]
    NotPositiveDefinite { pivot: usize },

    #[error("subset expansion over order {order} exceeds the cap of {cap}")]
    CapacityExceeded { order: usize, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("column {requested} requested but the family horizon is {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    #[error("degenerate family: {0}")]
    Degenerate(String),

    #[error("unsupported in {mode} mode: {what}")]
    Unsupported { mode: &'static str, what: String },

    #[error("cannot parse {text:?} as a scalar: {reason}")]
    Parse { text: String, reason: String },
}
