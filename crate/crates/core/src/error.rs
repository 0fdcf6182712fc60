use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file.
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Well-formed input that violates a dataset invariant (missing label, empty graph, ...).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(
        "numeric overflow{}: non-finite Gramian entries (spectral bound {spectral_bound:e})",
        graph_id.map(|id| format!(" in graph {id}")).unwrap_or_default()
    )]
    NumericOverflow {
        graph_id: Option<u64>,
        spectral_bound: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Attaches a graph id to errors raised below the graph level.
    pub fn in_graph(self, id: u64) -> Self {
        match self {
            Error::NumericOverflow {
                graph_id: None,
                spectral_bound,
            } => Error::NumericOverflow {
                graph_id: Some(id),
                spectral_bound,
            },
            Error::Numeric(msg) => Error::Numeric(format!("graph {id}: {msg}")),
            Error::DegenerateInput(msg) => Error::DegenerateInput(format!("graph {id}: {msg}")),
            other => other,
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Contract(_) => 2,
            Error::Parse { .. } | Error::Integrity(_) | Error::Io { .. } => 3,
            Error::Numeric(_) | Error::NumericOverflow { .. } | Error::DegenerateInput(_) => 4,
        }
    }
}
