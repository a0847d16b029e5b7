use thiserror::Error;

/// Exit codes: 2 for configuration errors, 3 for computation caps, 1 for
/// anything else (and for reports containing a FAIL record).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] aswtower::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_cap() => 3,
            CliError::Core(e) if e.is_config() => 2,
            _ => 1,
        }
    }
}

impl From<aswtower::ModelError> for CliError {
    fn from(e: aswtower::ModelError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<aswtower::CohomologyError> for CliError {
    fn from(e: aswtower::CohomologyError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<aswtower::ZetaError> for CliError {
    fn from(e: aswtower::ZetaError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<aswtower::FitError> for CliError {
    fn from(e: aswtower::FitError) -> Self {
        CliError::Core(e.into())
    }
}
