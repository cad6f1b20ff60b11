use thiserror::Error;

pub type NnlsResult<T> = Result<T, NnlsError>;

/// Errors are split into two families: bad input (`Invalid*`, `Domain`,
/// `DimensionMismatch`) and numerical failure (`NonConvergence`,
/// `NonFinite`). The CLI maps them to different exit codes.
#[derive(Debug, Error)]
pub enum NnlsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("eigendecomposition residual {residual:e} exceeds tolerance {tol:e}")]
    EigenResidual { residual: f64, tol: f64 },
}

impl NnlsError {
    /// True for failures of a numerical procedure, as opposed to
    /// rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::NonConvergence { .. } | Self::NonFinite { .. } | Self::EigenResidual { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidParameter(msg.into())
    }
}
