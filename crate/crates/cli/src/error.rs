use serde_json::json;

/// Failure of one command, with its exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, parameters out of range, malformed input files.
    #[error("{kind}: {message}")]
    Validation { kind: &'static str, message: String },
    #[error("io: {0}")]
    Io(String),
    /// A check command ran and the object it checked is invalid.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        Self::Validation {
            kind,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation { .. } => 2,
            Self::Io(_) | Self::CheckFailed(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation { kind, .. } => kind,
            Self::Io(_) => "io",
            Self::CheckFailed(_) => "check_failed",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Self::Validation { message, .. } => message.clone(),
            Self::Io(m) | Self::CheckFailed(m) => m.clone(),
        }
    }

    /// The single stderr line: `{"error": kind, "message": ..., "exit_code": n}`.
    pub fn to_line(&self) -> String {
        json!({"error": self.kind(), "message": self.message(), "exit_code": self.exit_code()}).to_string()
    }
}

impl From<primegap::Error> for CliError {
    fn from(e: primegap::Error) -> Self {
        use primegap::Error as E;
        let kind = match &e {
            E::InvalidParameter(_) => "invalid_parameter",
            E::MemoryBudget { .. } => "memory_budget",
            E::FactorizationUnavailable(_) => "factorization_unavailable",
            E::PeriodTooLarge(_) => "period_too_large",
            E::EnumerationTooLarge(_) => "enumeration_too_large",
            E::NotCovering { .. } => "not_covering",
            E::InvalidAssignment(_) => "invalid_assignment",
        };
        Self::validation(kind, e.to_string())
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
