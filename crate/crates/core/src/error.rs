//! Crate-wide error type.

/// Errors produced by the quaternion linear algebra and solver layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Inversion of the zero quaternion.
    #[error("division by zero quaternion")]
    DivisionByZero,

    /// A real matrix does not carry the 4x4 block sign pattern of a
    /// quaternion real counterpart.
    #[error("malformed real counterpart: {0}")]
    Structure(String),

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A preconditioner could not be built or applied.
    #[error("preconditioner failure: {0}")]
    Preconditioner(String),

    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),

    /// A run log was written by an unsupported format version.
    #[error("unsupported run log version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
