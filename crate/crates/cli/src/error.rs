use std::path::PathBuf;

/// Everything the front end can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Rejected by the argument parser (also carries `--help`/`--version`).
    #[error("{0}")]
    Usage(#[from] clap::Error),

    #[error("missing required parameter `{0}`")]
    Missing(&'static str),

    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("config file {}: {message}", path.display())]
    ConfigFile { path: PathBuf, message: String },

    #[error("fit did not converge; result written with converged = false")]
    NotConverged,

    #[error(transparent)]
    Core(#[from] kerrkit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use kerrkit::Error as E;
        match self {
            CliError::Usage(e) => u8::try_from(e.exit_code()).unwrap_or(2),
            CliError::Missing(_) | CliError::Invalid { .. } => 2,
            // unreadable config is an IO failure, malformed config a validation one
            CliError::ConfigFile { message, .. } if message.starts_with("cannot read") => 4,
            CliError::ConfigFile { .. } => 2,
            CliError::NotConverged => 3,
            CliError::Core(e) => match e {
                E::Fit(_) | E::NotConverged { .. } | E::Internal(_) => 3,
                E::Io { .. } | E::OutputExists(_) => 4,
                _ => 2,
            },
        }
    }
}
