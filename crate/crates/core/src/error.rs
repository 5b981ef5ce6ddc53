use thiserror::Error;

/// Errors raised by graph construction and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("empty graph")]
    EmptyGraph,

    #[error("no edges")]
    NoEdges,

    #[error("degenerate graph: {0}")]
    Degenerate(String),

    #[error("zero total")]
    ZeroTotal,

    #[error("no reachable pairs")]
    NoReachablePairs,

    #[error("unknown node ids: {}", .0.join(", "))]
    UnknownNodes(Vec<String>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Indicates a Louvain state that was driven outside its preconditions.
    #[error("internal bookkeeping error: {0}")]
    Bookkeeping(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
