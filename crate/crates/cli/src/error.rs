use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: attrest::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>, source: attrest::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 0 success, 1 I/O, 2 validation/parse, 3 numerical, 4 resource.
    pub fn exit_code(&self) -> i32 {
        use attrest::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core { source, .. } => match source {
                E::TooManySamples { .. } => 4,
                E::SingularSystem { .. }
                | E::DivisionByZero(_)
                | E::Domain(_)
                | E::DegenerateAuxiliary
                | E::CoefficientMismatch { .. }
                | E::Replicate { .. }
                | E::Subset { .. }
                | E::UnreachableTarget(_) => 3,
                _ => 2,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
