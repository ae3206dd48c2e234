use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{col}: {msg}")]
    Parse {
        path: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("validation: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] stochastic_vc::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config: {0}")]
    Config(String),
}

impl CliError {
    /// Exit status: 1 for malformed or invalid inputs, 2 for runtime
    /// failures.
    pub fn exit_code(&self) -> i32 {
        use stochastic_vc::Error as Core;
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Config(_) => 1,
            CliError::Core(e) => match e {
                Core::DuplicateEdge(..)
                | Core::SelfLoop(..)
                | Core::ProbabilityOutOfRange { .. }
                | Core::EndpointOutOfRange { .. }
                | Core::ParameterOutOfRange(..)
                | Core::InvalidRsGraph(..) => 1,
                _ => 2,
            },
            CliError::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
