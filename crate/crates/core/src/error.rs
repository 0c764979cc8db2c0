use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate boundary vertex {0}")]
    DuplicateBoundary(usize),
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("face {0} boundary revisits a vertex and could not be split by chords")]
    NonCycleFace(usize),
    #[error("face {0} cannot be triangulated without duplicating an existing edge")]
    ChordConflict(usize),
    #[error("embedding is not fully triangulated")]
    NotTriangulated,
    #[error("embedding has genus {0}, expected 0")]
    NonzeroGenus(usize),
    #[error("an interior component has no boundary vertex")]
    SingularInterior,
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("function vanishes on the boundary")]
    ZeroBoundaryNorm,
    #[error("boundary centroid is not zero (norm {0:e})")]
    CentroidNotZero(f64),
    #[error("path for source edge {0} is not a valid edge-simple walk in the host")]
    BrokenPath(usize),
    #[error("path for source edge {0} does not join the mapped endpoints")]
    EndpointMismatch(usize),
    #[error("vertex map does not carry the source boundary onto the host boundary")]
    BoundaryMismatch,
    #[error("vertex map is not injective")]
    NonInjective,
    #[error("mobius normalization stalled with centroid norm {0:e}")]
    NormalizationFailure(f64),
    #[error("certificate violated: lambda2 {lambda2} exceeds geometric bound {bound}")]
    CertificateUnsound { lambda2: f64, bound: f64 },
    #[error("u and v must differ")]
    SameVertex,
    #[error("parameters too small: {0}")]
    TooSmall(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("json error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid document at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("instance has {n} vertices, above the cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for numerical failures, as opposed to rejected input.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_) | Error::NormalizationFailure(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
