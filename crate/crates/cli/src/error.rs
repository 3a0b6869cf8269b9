use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed spec document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] ewens_core::Error),
}

impl CliError {
    /// 2 validation, 3 internal cross-check, 4 invariant violation.
    pub fn exit_code(&self) -> i32 {
        use ewens_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::Io { .. } | CliError::Json(_) => 2,
            CliError::Csv(_) => 1,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) => 2,
                E::InvariantViolation(_) => 4,
                E::CrossCheck { .. }
                | E::TailNotCertified { .. }
                | E::TruncationTooShort { .. }
                | E::QuadratureNonConvergence { .. } => 3,
            },
        }
    }
}

pub fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub type CliResult<T> = std::result::Result<T, CliError>;
