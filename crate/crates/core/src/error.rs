use thiserror::Error;

/// Errors raised by graph construction, queries and the verification sweeps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("too many nodes: {0} (at most 64 are supported)")]
    Capacity(usize),

    #[error("self-loop on node {0:?}")]
    SelfLoop(String),

    #[error("duplicate edge between {0:?} and {1:?}")]
    DuplicateEdge(String, String),

    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("invalid node label {0:?}")]
    InvalidLabel(String),

    #[error("node index {0} is not a vertex of the graph")]
    NotAVertex(usize),

    #[error("X, Y and Z must be pairwise disjoint")]
    Overlap,

    #[error("X and Y must both be non-empty")]
    EmptySide,

    #[error("{operation} supports at most {max} nodes, got {actual}")]
    SizeGuard {
        operation: &'static str,
        max: usize,
        actual: usize,
    },

    #[error("graph structure does not match kind {kind}: {reason}")]
    KindMismatch { kind: String, reason: String },

    #[error("graph is not a forest")]
    NotForest,

    #[error("statement {0} is not in the closure")]
    NotEstablished(String),

    #[error("rule application rejected: {0}")]
    RuleRejected(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
