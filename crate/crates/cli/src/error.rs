use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bgkpml::Error),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn file(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::File { path, source }
    }

    /// Process exit code: 2 for bad input, 3 for a blow-up, 4 for failed
    /// cubature nodes, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        use bgkpml::Error as E;
        let code = match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Config { .. } | E::Parse { .. } | E::InvalidInput(_) | E::OutOfBox { .. }) => 2,
            CliError::Core(E::BlowUp { .. } | E::SingularState { .. }) => 3,
            CliError::Core(E::PoisonedNodes { .. }) => 4,
            _ => 1,
        };
        ExitCode::from(code)
    }
}

pub type CliResult<T> = Result<T, CliError>;
