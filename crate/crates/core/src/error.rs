use thiserror::Error;

/// Errors raised by the laboratory's operations.
///
/// Input problems and numerical failures are kept apart so that callers (the
/// CLI in particular) can map them onto different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for prefix of length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} usable samples, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error(
        "quadrature did not converge after {panels} panels: error estimate {error:.3e} > target {target:.3e}"
    )]
    QuadratureFailure {
        panels: usize,
        error: f64,
        target: f64,
    },

    #[error("tail bound {bound:.3e} still above target {target:.3e} at horizon {horizon:.3e}")]
    HorizonExceeded {
        horizon: f64,
        bound: f64,
        target: f64,
    },

    #[error(
        "cancellation alarm: compensated error estimate {estimate:.3e} exceeds {tolerance:.3e}"
    )]
    CancellationAlarm { estimate: f64, tolerance: f64 },

    #[error("coefficient rule cannot be bounded: {0}")]
    UnboundedCoefficients(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::HorizonExceeded { .. }
                | Error::CancellationAlarm { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
