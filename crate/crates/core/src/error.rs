use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading a dyad-level CSV file.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("expected header `i,j,y,x`, found `{found}`")]
    Header { found: String },
    #[error("row {row}: node indices are 1-based, found ({i},{j})")]
    ZeroIndex { row: usize, i: usize, j: usize },
    #[error("row {row}: self link ({i},{i}) is not allowed")]
    SelfLink { row: usize, i: usize },
    #[error("row {row}: non-finite value for dyad ({i},{j})")]
    NonFinite { row: usize, i: usize, j: usize },
    #[error("duplicate dyad ({i},{j})")]
    Duplicate { i: usize, j: usize },
    #[error("missing dyad ({i},{j}); a complete directed network needs N(N-1) = {expected} rows")]
    Missing { i: usize, j: usize, expected: usize },
    #[error("dataset has {n} nodes; at least 4 are required")]
    TooFewNodes { n: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 4 nodes to form a tetrad, got {n}")]
    DegenerateSize { n: usize },
    #[error("degenerate Hessian: {gamma:e} <= {threshold:e} (is x additive in sender/receiver effects?)")]
    DegenerateHessian { gamma: f64, threshold: f64 },
    #[error("degenerate variance estimate: {0}")]
    DegenerateVariance(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("oracle input error: {0}")]
    OracleInput(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Serialize(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
