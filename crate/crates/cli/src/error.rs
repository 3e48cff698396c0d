use relgraph::analysis::AnalysisError;
use relgraph::builders::BuildError;
use relgraph::graph::GraphError;
use relgraph::model_io::{ArchiveError, ConnectomeError, ValidationError};
use thiserror::Error;

/// Every failure maps to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ArchiveError> for CliError {
    fn from(e: ArchiveError) -> Self {
        match e {
            ArchiveError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Input(format!("bad archive: {other}")),
        }
    }
}

impl From<ConnectomeError> for CliError {
    fn from(e: ConnectomeError) -> Self {
        match e {
            ConnectomeError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Input(format!("invalid model: {e}"))
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Build(b) => b.into(),
            AnalysisError::Graph(g) => g.into(),
            AnalysisError::InconsistentMeta(_) | AnalysisError::TooSmall(_) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Degenerate(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Input(format!("malformed csv: {e}"))
        }
    }
}
