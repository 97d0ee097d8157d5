use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or structurally invalid input.
    Input,
    /// A value outside the region where a formula is defined.
    Domain,
    /// Two computations that must agree did not.
    Consistency,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("improper edge coloring: {0}")]
    ImproperColoring(String),
    #[error("ball of radius {have} is too small, need radius >= {need}")]
    RadiusTooSmall { have: usize, need: usize },
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(usize, usize),
    #[error("graph is not regular")]
    NotRegular,
    #[error("series: {0}")]
    Series(String),
    #[error("series mode mismatch: cannot combine exact and float coefficients")]
    ModeMismatch,
    #[error("voltage graph: {0}")]
    Voltage(String),
    #[error("degree bound {bound} exceeded at {witness}")]
    DegreeBound { bound: usize, witness: String },
    #[error("almost homomorphism: {0}")]
    AlmostHom(String),
    #[error("evaluation point outside the admissible disc: |u| = {modulus} >= {limit}")]
    OutsideDisc { modulus: f64, limit: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::OutsideDisc { .. } | Error::Domain(_) | Error::NotRegular => ErrorKind::Domain,
            Error::Consistency(_) => ErrorKind::Consistency,
            _ => ErrorKind::Input,
        }
    }
}
