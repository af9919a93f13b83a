use qnr_core::Error as CoreError;
use thiserror::Error;

/// Errors surfaced by the CLI. Each maps to an exit code and a stable token
/// printed on stderr as `error[TOKEN]: message`.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0}")]
    InvalidInput(String),
    #[error("{0}")]
    ResourceCap(String),
    #[error("p = {p}: check `{check}` failed")]
    VerificationFailed { p: u64, check: String },
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn token(&self) -> &'static str {
        match self {
            CliError::NotPrime(_) => "NOT_PRIME",
            CliError::InvalidInput(_) => "INVALID_INPUT",
            CliError::ResourceCap(_) => "RESOURCE_CAP",
            CliError::VerificationFailed { .. } => "VERIFICATION_FAILED",
            CliError::Internal(_) => "INTERNAL",
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => "IO",
        }
    }

    /// 0 pass, 1 verification failure, 2 invalid input, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed { .. } | CliError::Internal(_) => 1,
            CliError::ResourceCap(_) => 3,
            _ => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotPrime(p) => CliError::NotPrime(p),
            CoreError::QubitCapExceeded { .. } => CliError::ResourceCap(e.to_string()),
            CoreError::MeanOffTarget { .. }
            | CoreError::ParitySplit { .. }
            | CoreError::SampleOutsideSupport(_)
            | CoreError::NonRealAmplitude { .. } => CliError::Internal(e.to_string()),
            other => CliError::InvalidInput(other.to_string()),
        }
    }
}
