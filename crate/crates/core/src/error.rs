use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} = {value} exceeds the cap {cap}")]
    Capacity {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("singular coefficient: rapidities #{i} and #{j} coincide (|sinh(difference)| = {gap:e})")]
    SingularCoefficient { i: usize, j: usize, gap: f64 },

    #[error("unresolved degeneracy in sector {sector}: {detail}; retry with different probe points")]
    Degeneracy { sector: usize, detail: String },

    #[error("sector mismatch: eigenvector lives in sector {eigen}, product has {product} B-operators, so F_n vanishes identically")]
    SectorMismatch { eigen: usize, product: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("grid collision: {0}")]
    GridCollision(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
