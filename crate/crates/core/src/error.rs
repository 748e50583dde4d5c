use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// Exhaustive routines refuse inputs whose enumeration would explode.
    #[error("size error: {0}")]
    Size(String),

    #[error("degenerate spectrum: eigenvalues {0} and {1} are not separated")]
    DegenerateSpectrum(f64, f64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no training item carries label {0}")]
    LabelCoverage(u32),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
