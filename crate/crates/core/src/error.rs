use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e}, tolerance {tol:.1e})")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Fock cutoff {n_max} too small: truncation deficit {deficit:.3e} exceeds {tol:.1e}")]
    CutoffTooSmall { n_max: usize, deficit: f64, tol: f64 },

    #[error("support violation: reference eigenvalue {eigenvalue:.3e} below floor carries weight {weight:.3e}")]
    SupportViolation { eigenvalue: f64, weight: f64 },

    #[error("subsystem index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("quadrature did not converge: error estimate {error:.3e} > {tol:.1e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence { error: f64, tol: f64, subdivisions: usize },

    #[error("proper time {tau} outside trajectory domain [{lo}, {hi}]")]
    OutOfDomain { tau: f64, lo: f64, hi: f64 },

    #[error("propagation did not converge: final-state change {change:.3e} > {tol:.1e} at {steps} steps")]
    PropagationNonConvergence { change: f64, tol: f64, steps: usize },
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. } | Error::PropagationNonConvergence { .. } | Error::CutoffTooSmall { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
