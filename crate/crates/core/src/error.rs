use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("quadrature did not converge in {context}: estimate {value:e}, error estimate {err_estimate:e}")]
    NotConverged {
        context: String,
        value: f64,
        err_estimate: f64,
    },
    #[error("q = {q:e} is below the small-q guard {q_min:e}; use the closed-form limits")]
    SmallQ { q: f64, q_min: f64 },
    #[error("chi_s vanishes ({0:e}); f_x is undefined here")]
    DivisionByZero(f64),
    #[error("P(k, k1, x, y) log argument out of domain: {0}")]
    Domain(String),
    #[error("singular system: null space of dimension {0}")]
    SingularSystem(usize),
    #[error("density floor violated: {0}")]
    DensityFloor(String),
    #[error("self-consistency not reached after {iterations} iterations (last residual {residual:e})")]
    ScfNotConverged { iterations: usize, residual: f64, history: Vec<f64> },
    #[error("norm drift {drift:e} at step {step} exceeds tolerance {tol:e}")]
    NormDrift { step: usize, drift: f64, tol: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Whether the failure is a numerical non-convergence (as opposed to bad
    /// input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::ScfNotConverged { .. }
                | Error::NormDrift { .. }
                | Error::SingularSystem(_)
                | Error::Quadrature(QuadError::NonFinite { .. })
        )
    }
}
