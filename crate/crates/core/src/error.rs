use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("zero vector")]
    ZeroVector,
    #[error("{what} has no entry for vertex {vertex}")]
    MissingVertex { what: &'static str, vertex: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("search budget exhausted after {nodes} nodes (bounds {lower}..={upper})")]
    BudgetExceeded {
        nodes: u64,
        lower: usize,
        upper: usize,
    },
    #[error("input has {size} elements, limit is {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("strategy does not win with certainty: {0} consistency violations")]
    NotWinning(usize),
    #[error("{stage}: eigenvalue {value:.3e} is too close to the rank cutoff")]
    AmbiguousRank { stage: &'static str, value: f64 },
    #[error("{stage}: post-condition failed: {reason}")]
    StageFailed { stage: &'static str, reason: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
