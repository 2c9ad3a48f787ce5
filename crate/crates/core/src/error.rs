use thiserror::Error;

/// Errors shared by the model, spectral, steady-state and scaling layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or derived quantity violates its domain; the message
    /// names the constraint.
    #[error("domain error: {0}")]
    Domain(String),

    /// The effective magnon frequency came out non-positive, so the
    /// quadratic expansion no longer describes a stable oscillator.
    #[error("degenerate model: effective magnon frequency {omega_eff:e} <= 0")]
    DegenerateModel { omega_eff: f64 },

    /// The drift matrix has an eigenvalue at or beyond the stability
    /// boundary; no steady-state covariance exists.
    #[error("drift matrix is not Hurwitz (max Re lambda = {max_re:e})")]
    NotHurwitz { max_re: f64 },

    /// The eigenvalue solver did not converge or produced non-finite output.
    #[error("eigenvalue computation failed")]
    NumericalFailure,

    /// The resolvent i*omega*I - A is numerically singular at this frequency.
    #[error("singular resolvent at omega = {omega:e}")]
    SingularResolvent { omega: f64 },

    /// Too few usable points for a power-law fit.
    #[error("insufficient data: {got} usable points, need at least {need}")]
    InsufficientData { need: usize, got: usize },

    /// Log-log fitting needs strictly positive abscissas and values;
    /// `rows` lists the offending point indices.
    #[error("non-positive values at rows {rows:?}")]
    NonPositiveValue { rows: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, Error>;
