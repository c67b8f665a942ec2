use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("support violation: {0}")]
    Support(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Validation problems are the caller's fault, numerical ones are not.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Grid(_) | Error::LengthMismatch { .. } | Error::Precondition(_) | Error::Support(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
