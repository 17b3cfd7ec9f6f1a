use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("points are not collinear (sigma3/sigma1 = {ratio:e})")]
    NonCollinear { ratio: f64 },
    #[error("degenerate cross-ratio")]
    DegenerateCrossRatio,
    #[error("undefined direction")]
    UndefinedDirection,
    #[error("empty point set")]
    EmptySet,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("not a strict join")]
    NotStrictJoin,
    #[error("point is not interior (slack {slack:e})")]
    NotInterior { slack: f64 },
    #[error("p and q coincide")]
    SamePoint,
    #[error("Hilbert metric undefined: domain is not properly convex")]
    HilbertUndefined,
    #[error("map does not preserve the domain (worst slack {slack:e})")]
    NotPreserved { slack: f64 },
    #[error("eigen solver failure (condition estimate {condition:e})")]
    Solver { condition: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("link domain requires domain samples")]
    NoSamples,
    #[error("NPCC structure not detected at tolerance")]
    NpccNotDetected,
    #[error("re-vertexing failed: {0}")]
    RevertexFailed(String),
    #[error("invalid construction: {0}")]
    Construct(String),
    #[error("ζ must commute with G")]
    ZetaNotCommuting,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}
