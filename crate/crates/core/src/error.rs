use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Fitted slopes are not strictly decreasing.
    #[error("concavity violation: slope of piece {piece} ({slope}) is not below the previous slope ({previous})")]
    ConcavityViolation {
        piece: usize,
        slope: f64,
        previous: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model error: {0}")]
    Model(String),

    /// The market could not be cleared, i.e. load cannot be served.
    #[error("infeasible market{}", hour.map(|h| format!(" in hour {h}")).unwrap_or_default())]
    InfeasibleMarket { hour: Option<usize> },

    #[error("unbounded market{}", hour.map(|h| format!(" in hour {h}")).unwrap_or_default())]
    UnboundedMarket { hour: Option<usize> },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    /// Every dangling reference found, not just the first.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("no emission factor for fuel '{0}'")]
    MissingFactor(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 2 when the market cannot be cleared, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleMarket { .. } | Error::UnboundedMarket { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_hour(self, hour: usize) -> Self {
        match self {
            Error::InfeasibleMarket { .. } => Error::InfeasibleMarket { hour: Some(hour) },
            Error::UnboundedMarket { .. } => Error::UnboundedMarket { hour: Some(hour) },
            other => other,
        }
    }
}
