use thiserror::Error;

/// Errors raised by the model, the numerical kernels and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value is invalid (non-finite, negative where it must not be, ...).
    #[error("invalid input: {0}")]
    Input(String),
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is not representable as a finite `f64`.
    #[error("range error: {0}")]
    Range(String),
    /// A series or iteration did not reach the requested precision.
    #[error("precision error: {0}")]
    Precision(String),
    /// A hitting-time search ran past its simulated-time cap.
    #[error("hitting time exceeded cap after {elapsed} time units")]
    Timeout { elapsed: f64 },
    /// A root finder could not proceed.
    #[error("solver error: {0}")]
    Solver(String),
    /// Configuration could not be read or is inconsistent.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable identifier, used in CLI error JSON and FFI codes.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::Precision(_) => "precision",
            Error::Timeout { .. } => "timeout",
            Error::Solver(_) => "solver",
            Error::Config(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} must be finite, got {x}")))
    }
}
