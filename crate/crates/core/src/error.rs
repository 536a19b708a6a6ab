use thiserror::Error;

/// Errors raised while building or combining the objects of this crate.
///
/// Validation *failures* (a skeleton violating the path-count condition, a
/// non-associative factorisation, a cocycle with nonzero residual) are not
/// errors: they come back as a [`crate::ValidationReport`]. The variants here
/// cover malformed input and violated preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),

    #[error("duplicate edge id `{id}` in color {color}")]
    DuplicateEdge { id: String, color: usize },

    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingVertex { edge: String, vertex: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: usize, k: usize },

    #[error("colors must be distinct (got {0} twice)")]
    RepeatedColor(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("block {0} is not a bijection")]
    NotBijective(String),

    #[error("missing block {0}")]
    MissingBlock(String),

    #[error("missing cocycle value for square {0}")]
    MissingSquare(String),

    #[error("block {block} is not unitary (defect {defect:e})")]
    NotUnitary { block: String, defect: f64 },

    #[error("invalid layer: {0}")]
    InvalidLayer(String),

    #[error("image is not contained in the kernel")]
    NotContained,

    #[error("matrices do not commute")]
    NonCommuting,

    #[error("operands live on different skeletons or block layouts: {0}")]
    SkeletonMismatch(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
