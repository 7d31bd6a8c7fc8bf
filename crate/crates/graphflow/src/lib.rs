//! File formats and the `graphflow` command-line front end over
//! [`graphflow_core`].

pub mod cli;
pub mod format;
pub mod output;

pub use graphflow_core as core;

use graphflow_core::fat::FatError;
use graphflow_core::graph::GraphError;
use graphflow_core::metric::MetricError;
use graphflow_core::morse::MorseError;
use graphflow_core::ops::OpsError;
use graphflow_core::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] format::ParseError),
    #[error("{path}:{error}")]
    ParseFile { path: String, error: format::ParseError },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fat(#[from] FatError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error("output: {0}")]
    Output(String),
    #[error("{0}")]
    Usage(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl Error {
    /// Process exit status: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
