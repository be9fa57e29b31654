use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A generalized eigenproblem had a larger mass kernel than allowed.
    #[error("degenerate mass matrix: kernel dimension {found} exceeds bound {bound}")]
    Degeneracy { found: usize, bound: usize },

    #[error("initial-value integration diverged at r = {radius}")]
    Divergence { radius: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residuals {residuals:?})")]
    Convergence { iterations: usize, residuals: [f64; 2] },

    #[error("solution is not positive in the interior (psi = {value} at r = {radius})")]
    PositivityViolation { radius: f64, value: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    /// The grid is too coarse to resolve a feature at the given radius.
    #[error("insufficient resolution near r = {radius}: {reason}")]
    Resolution { radius: f64, reason: String },

    #[error("vanishing-order fit is poor (residual {residual})")]
    PoorFit { residual: f64 },

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
