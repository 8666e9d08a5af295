use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("color {color} out of range 1..={l2}")]
    ColorOutOfRange { color: usize, l2: usize },

    #[error("point is outside the closed region: color {color} polynomial evaluates to {value:e}")]
    NotInClosure { color: usize, value: f64 },

    #[error("hypersurface {index} restricts to an unsupported curve: {reason}")]
    UnsupportedCurve { index: usize, reason: String },

    #[error("slice region is empty")]
    EmptyRegion,

    #[error("slice region is unbounded along hypersurface {index}")]
    UnboundedRegion { index: usize },

    #[error("non-manifold gluing at base edge ({a}, {b}): {count} incident triangles")]
    NonManifold { a: usize, b: usize, count: usize },

    #[error("color {color} has sphere dimension {dim}; only 0-spheres are supported")]
    UnsupportedSphereDim { color: usize, dim: u32 },

    #[error("embedding failed at base vertex {vertex}: a factor of color {color} is {value:e}")]
    Embedding { vertex: usize, color: usize, value: f64 },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unsupported stratum: {0}")]
    UnsupportedStratum(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
