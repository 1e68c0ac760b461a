//! Exit codes and the JSON error line written on failure.

use qroc_core::QrocError;
use serde::Serialize;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl Failure {
    pub fn capability(message: impl Into<String>) -> Self {
        Failure {
            error: "Unavailable".into(),
            message: message.into(),
            exit_code: EXIT_CAPABILITY,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            error: "Io".into(),
            message: message.into(),
            exit_code: EXIT_VALIDATION,
        }
    }
}

impl From<QrocError> for Failure {
    fn from(e: QrocError) -> Self {
        let exit_code = match e {
            QrocError::SingularGaussianState { .. } | QrocError::CutoffTooSmall { .. } => EXIT_CAPABILITY,
            QrocError::IllConditioned { .. } => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        Failure {
            error: e.kind().into(),
            message: e.to_string(),
            exit_code,
        }
    }
}
