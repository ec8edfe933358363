use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph file, line {line}: {msg}")]
    GraphFormat { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator gave up after {0} attempts")]
    RetriesExhausted(usize),

    #[error("degenerate generator request: {0}")]
    DegenerateSpec(String),

    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph too large for exhaustive search (n = {n}, limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("enumeration cap of {0} exceeded")]
    EnumerationCap(usize),

    #[error("scripted answer source exhausted after {0} answers")]
    AnswersExhausted(usize),

    #[error("mask length mismatch: {left} edges vs {right}")]
    MaskMismatch { left: usize, right: usize },

    #[error("empty vertex set where a nonempty one is required")]
    EmptySet,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
