use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Graph validation errors name the structural assumption they violate so a
/// caller loading a file can tell which property of the input is wrong.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("loop edge at vertex {0}: graphs must not connect a vertex to itself")]
    LoopEdge(usize),
    #[error("duplicate edge ({0}, {1}): multi-edges are not allowed")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected: traversal from vertex 0 reached {reached} of {n} vertices")]
    Disconnected { reached: usize, n: usize },
    #[error("single-vertex graph has degree 0, so the normalized Laplacian is undefined")]
    TrivialGraph,
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("graph with {n} vertices exceeds the dense solver limit of {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("band [0, {omega}] contains no eigenvalues")]
    EmptyBand { omega: f64 },
    #[error("vertex set is empty: the Poincare inequality holds vacuously")]
    EmptySet,
    #[error("no finite lambda exists: the restricted Laplacian has a nontrivial kernel")]
    NoFiniteLambda,
    #[error("set is not independent: vertices {0} and {1} are adjacent")]
    NotIndependent(usize, usize),
    #[error("closures of subsets {first} and {second} share vertex {vertex}")]
    OverlappingClosures {
        first: usize,
        second: usize,
        vertex: usize,
    },
    #[error("sampling set is empty")]
    EmptySamplingSet,
    #[error("not a sampling set: lower frame bound {lower_bound:e} <= rank tolerance {rank_tol:e}")]
    NotASamplingSet { lower_bound: f64, rank_tol: f64 },
    #[error("sample index mismatch: {0}")]
    SampleIndexMismatch(String),
    #[error("band too wide: lambda * omega = {product} >= 1")]
    BandTooWide { product: f64 },
    #[error("bandwidth must be strictly positive")]
    ZeroBandwidth,
    #[error("complement of the sampling set is empty")]
    ComplementEmpty,
    #[error("no admissible set: every singleton violates the lambda cap {cap}")]
    NoAdmissibleSet { cap: f64 },
    #[error("infeasible target: lower frame bound {a_min} cannot exceed 1")]
    InfeasibleTarget { a_min: f64 },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("dense solver failed: {0}")]
    SolverFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyGraph => "EmptyGraph",
            Error::LoopEdge(..) => "LoopEdge",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::Disconnected { .. } => "Disconnected",
            Error::TrivialGraph => "TrivialGraph",
            Error::VertexOutOfRange { .. } => "VertexOutOfRange",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SizeLimitExceeded { .. } => "SizeLimitExceeded",
            Error::EmptyBand { .. } => "EmptyBand",
            Error::EmptySet => "EmptySet",
            Error::NoFiniteLambda => "NoFiniteLambda",
            Error::NotIndependent(..) => "NotIndependent",
            Error::OverlappingClosures { .. } => "OverlappingClosures",
            Error::EmptySamplingSet => "EmptySamplingSet",
            Error::NotASamplingSet { .. } => "NotASamplingSet",
            Error::SampleIndexMismatch(_) => "SampleIndexMismatch",
            Error::BandTooWide { .. } => "BandTooWide",
            Error::ZeroBandwidth => "ZeroBandwidth",
            Error::ComplementEmpty => "ComplementEmpty",
            Error::NoAdmissibleSet { .. } => "NoAdmissibleSet",
            Error::InfeasibleTarget { .. } => "InfeasibleTarget",
            Error::Format(_) => "Format",
            Error::SolverFailed(_) => "SolverFailed",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
