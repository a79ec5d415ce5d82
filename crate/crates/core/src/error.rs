use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("relative state undefined: partial overlap norm {0:e} is below 1e-12")]
    ZeroOverlap(f64),

    #[error("incomplete expectation map: missing correlator {0}")]
    IncompleteExpectations(String),

    #[error("malformed document at {location}: {message}")]
    Document { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of the numerics themselves, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }

    pub(crate) fn document(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Document {
            location: location.into(),
            message: message.into(),
        }
    }
}
