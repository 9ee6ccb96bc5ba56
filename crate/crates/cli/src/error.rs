use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    NonConvergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Config(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<chlab_core::Error> for CliError {
    fn from(e: chlab_core::Error) -> Self {
        use chlab_core::Error as E;
        match e {
            E::NonConvergence(_) | E::BracketFailure(_) => CliError::NonConvergence(e.to_string()),
            E::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}
