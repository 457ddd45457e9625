use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected: vertex {0} is not reachable from the first vertex")]
    Disconnected(String),
    #[error("graph has no external (infinite) edge")]
    NoExternalEdge,
    #[error("edge {edge}: length must be positive and finite, got {length}")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("edge {edge}: endpoint refers to unknown vertex {vertex}")]
    DanglingEndpoint { edge: usize, vertex: String },
    #[error("edge {edge}: {reason}")]
    InvalidEdge { edge: usize, reason: String },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("evaluation produced a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("potential on edge {edge} failed at x = {x}")]
    PotentialEvaluation { edge: usize, x: f64 },

    #[error("mesh width {h} must be positive and smaller than the shortest edge ({shortest})")]
    MeshWidth { h: f64, shortest: f64 },
    #[error("functions live on different meshes")]
    MeshMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero pivot at row {0} during factorization")]
    SingularMatrix(usize),
    #[error("{what} did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("linear ground state is unusable: {0}")]
    SpectralAssumption(String),
    #[error("branch too short: {0} points, need at least {1}")]
    BranchTooShort(usize, usize),
    #[error("mass {mass} lies outside the branch range [{min}, {max}]")]
    MassOutOfRange { mass: f64, min: f64, max: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("graph spec: {0}")]
    Spec(String),
}
