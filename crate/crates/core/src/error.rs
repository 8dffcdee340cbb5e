use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("vertex ids must be dense and in order: found id {found} at position {index}")]
    NonDenseVertexIds { index: usize, found: usize },
    #[error("edge ids must be dense and in order: found id {found} at position {index}")]
    NonDenseEdgeIds { index: usize, found: usize },
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("vertex list references unknown vertex {0}")]
    UnknownBoundaryVertex(usize),
    #[error("edges {first} and {second} leave vertex {vertex} at the same angle")]
    AngularTie { vertex: usize, first: usize, second: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("malformed network JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("vertex {0} lies in a component with no clamped vertex")]
    Disconnected(usize),
    #[error("clamped set must be a nonempty proper subset of the vertices")]
    BadClampedSet,
    #[error("clamped value at vertex {0} is not finite")]
    NonFiniteBoundary(usize),
    #[error("linear solver failed: {0}")]
    SolverFailure(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulusError {
    #[error("more than {0} simple paths between A and B")]
    TooManyPaths(usize),
    #[error("no path connects A to B")]
    EmptyFamily,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("orientation by potential contains a directed cycle through vertex {0}")]
    CycleDetected(usize),
    #[error("topology error: {0}")]
    TopologyError(String),
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("triangles meeting along edge {0}-{1} are not locally Delaunay")]
    NonDelaunay(usize, usize),
    #[error("degenerate quad or triangle: {0}")]
    DegenerateQuad(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid boundary arcs: {0}")]
    InvalidArcs(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TilingError {
    #[error("tiling geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("no analytic reference heights for this domain")]
    NoReference,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
