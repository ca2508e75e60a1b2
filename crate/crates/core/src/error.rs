use thiserror::Error;

use crate::integrator::StepReport;

#[derive(Debug, Error)]
pub enum Error {
    /// A material law was evaluated outside its domain (nonpositive strain or stretch).
    #[error("{quantity} must be positive, got {value}")]
    Domain { quantity: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{} validation error(s): {}", .0.len(), .0.join("; "))]
    Validation(Vec<String>),

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error("Newton iteration did not converge after {} iterations (residual {:.3e})", .0.iterations, .0.final_residual_norm)]
    NonConvergence(StepReport),

    #[error("singular Newton Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_positive(quantity: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { quantity, value })
    }
}
