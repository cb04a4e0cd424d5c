use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Check(#[from] fuzzynorm::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for usage, config and input faults; 3 for contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(fuzzynorm::Error::ContractViolation(_)) => 3,
            _ => 2,
        }
    }
}
