use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("tangled mesh: {0}")]
    Tangled(String),

    #[error("non-positive density at node {node}: {value}")]
    NonPositiveDensity { node: usize, value: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("complex characteristic roots at x = {0}")]
    ComplexRoots(f64),

    #[error("fixed-point iteration did not converge at level {level} after {iterations} iterations")]
    NotConverged {
        level: usize,
        iterations: usize,
        log: Box<crate::mpde1d::IterationLog>,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
