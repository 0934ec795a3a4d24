use thiserror::Error;

/// Errors raised by the model, sampling and estimation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("angular width is not positive ({sigma}) at omega = {omega}")]
    NonPositiveWidth { omega: f64, sigma: f64 },

    #[error("dispersion solver did not converge at omega = {omega} (residual {residual:e})")]
    DispersionNotConverged { omega: f64, residual: f64 },

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid frequency selection: {0}")]
    InvalidSelection(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("singular model matrix at frequency index {index} (determinant {det:e})")]
    SingularModel { index: isize, det: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
