use thiserror::Error;

/// Errors raised by the ROC engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrocError {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e}, allowed {allowed:e})")]
    NonHermitianInput { asymmetry: f64, allowed: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parameter `{name}` = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("degenerate parameter combination: {0}")]
    DegenerateParameter(String),

    #[error("covariance matrix is unphysical (min eigenvalue of V + iΩ/2 is {min_eigenvalue:e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("covariance matrix is not symmetric (max asymmetry {asymmetry:e})")]
    AsymmetricCovariance { asymmetry: f64 },

    #[error("Gaussian state is pure or nearly pure (min symplectic eigenvalue {min_symplectic:e})")]
    SingularGaussianState { min_symplectic: f64 },

    #[error("matrix function is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("Fock cutoff too small: trace deficit {deficit:e}")]
    CutoffTooSmall { deficit: f64 },

    #[error("rate {rate} is outside [0, {max_rate}]")]
    RateOutOfRange { rate: f64, max_rate: f64 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl QrocError {
    /// Stable machine-readable identifier for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            QrocError::NonHermitianInput { .. } => "NonHermitianInput",
            QrocError::NotPositiveSemidefinite { .. } => "NotPositiveSemidefinite",
            QrocError::TraceNotOne { .. } => "TraceNotOne",
            QrocError::DimensionMismatch { .. } => "DimensionMismatch",
            QrocError::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            QrocError::DegenerateParameter(_) => "DegenerateParameter",
            QrocError::Unphysical { .. } => "Unphysical",
            QrocError::AsymmetricCovariance { .. } => "AsymmetricCovariance",
            QrocError::SingularGaussianState { .. } => "SingularGaussianState",
            QrocError::IllConditioned { .. } => "IllConditioned",
            QrocError::CutoffTooSmall { .. } => "CutoffTooSmall",
            QrocError::RateOutOfRange { .. } => "RateOutOfRange",
            QrocError::Malformed(_) => "Malformed",
        }
    }
}

pub type Result<T> = std::result::Result<T, QrocError>;

/// Rejects values outside [0, 1] (NaN included).
pub fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(QrocError::ParameterOutOfRange { name, value })
    }
}

pub(crate) fn check_open_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(QrocError::ParameterOutOfRange { name, value })
    }
}
