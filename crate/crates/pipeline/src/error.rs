use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: row {row} (line {line}): {message}")]
    Parse {
        path: String,
        row: usize,
        line: usize,
        message: String,
    },

    #[error("data: {0}")]
    Data(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] buoyspec::Error),
}

impl PipelineError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        use buoyspec::Error as E;
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Parse { .. } | PipelineError::Data(_) | PipelineError::Io { .. } => 2,
            PipelineError::Numerical(_) => 3,
            PipelineError::Core(e) => match e {
                E::InvalidParameter { .. } | E::InvalidSelection(_) | E::InvalidSettings(_) => 1,
                E::InvalidSample(_) => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
