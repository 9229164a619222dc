use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {0} lies outside [-1, 1]")]
    Domain(f64),

    #[error("index {index} out of range (must be < {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error(
        "matrix is not strictly diagonally dominant at row {row} (margin {margin:e}); \
         the pivot-free banded path is unsafe, use the dense solver"
    )]
    NotDiagonallyDominant { row: usize, margin: f64 },

    #[error("matrix is numerically singular (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("expected a function in the {expected} basis")]
    WrongBasis { expected: &'static str },

    #[error("unknown example id {0} (expected 1..=4)")]
    UnknownExample(u8),

    #[error("mesh is empty")]
    EmptyMesh,
}

pub type Result<T> = std::result::Result<T, Error>;
