use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto the CLI exit codes: `Resource` is a budget
/// overrun (exit 2), `Invariant` an internal inconsistency (exit 3), and
/// everything else is a usage or input problem (exit 1).
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A 1-based index fell outside its valid range.
    #[error("index error: {0}")]
    Index(String),

    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A configured size or work budget would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
