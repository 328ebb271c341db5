use thiserror::Error;

/// Errors raised by the numerics, state and metric layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("dimension {0} exceeds the supported maximum of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (deviation {0:e})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("incompatible configuration: {0}")]
    Incompatible(String),

    #[error("unrealizable angle triple (Gram determinant {0:e})")]
    Unrealizable(f64),

    #[error("invalid state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
