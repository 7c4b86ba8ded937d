use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller passed operands whose shapes do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A rational could not be represented as a finite `f64`.
    #[error("numeric range: {label} does not fit in a finite double")]
    NumericRange { label: String },
    /// An operation was asked of an object that does not satisfy its hypotheses.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The radical filtration is only computed for a few algebra shapes.
    #[error("filtration-unsupported: {0}")]
    FiltrationUnsupported(String),
    /// Anything outside the implemented scope.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Numerical geometry met a (near) degenerate induced metric or a failed projection.
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// Malformed input text (JSON, descriptors, rationals).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
