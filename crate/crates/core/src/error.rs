use thiserror::Error;

/// Errors raised by the library.
///
/// The split between precondition failures (`Domain`, `Argument`,
/// `Unverified`, `Mismatch`) and numerical failures (`Evaluation`,
/// `Quadrature`) is what the command-line front end maps to exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the valid range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("non-finite value at x = {at}: {context}")]
    Evaluation { at: f64, context: String },

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("Sonin condition not verified: max residual {max_residual:e} exceeds {tolerance:e}")]
    Unverified { max_residual: f64, tolerance: f64 },

    #[error("parameter mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical trouble.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Evaluation { .. } | Error::Quadrature(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
