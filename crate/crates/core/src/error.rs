use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for a graph with {vertices} vertices")]
    VertexOutOfRange { index: usize, vertices: usize },

    #[error("edge index {index} out of range for a graph with {edges} edges")]
    EdgeOutOfRange { index: usize, edges: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph exceeds the encodable size (255 vertices, edges, markings and weight)")]
    TooLarge,

    #[error("(g, n) = ({g}, {n}) is outside the stable range 2g - 2 + n > 0")]
    UnstableParameters { g: u32, n: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("predicate is not closed under contraction: contracting edge {edge} of {graph} leaves the subcomplex")]
    ClosureViolation { graph: String, edge: usize },

    #[error("resource limit reached after {classes} classes (levels down to {completed_edges} edges complete); checkpoint: {checkpoint}")]
    ResourceLimit {
        classes: usize,
        completed_edges: usize,
        checkpoint: String,
    },

    #[error("malformed catalog: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
