use thiserror::Error;

pub type Result<T, E = GeoError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("metric index {0} is not supported (only Riemannian or Lorentzian)")]
    IndexTooLarge(usize),

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("gram matrix is degenerate")]
    DegenerateGram,

    #[error("value leaves the exact field: {0}")]
    NotRepresentable(String),

    #[error("vectors do not span an orthonormal nondegenerate plane")]
    DegeneratePlane,

    #[error("vector is null (or zero) where a non-null vector is required")]
    NullVector,

    #[error("vector is not unit length")]
    NonUnitVector,

    #[error("input basis is linearly dependent")]
    DependentBasis,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownCatalog(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid parameter {name}: {message}")]
    InvalidParam { name: String, message: String },

    #[error("degenerate induced metric")]
    DegenerateInducedMetric,

    #[error("frame is rank deficient at u = {u:?}")]
    RankDeficientFrame { u: Vec<f64> },

    #[error("induced metric is not positive definite at u = {u:?}")]
    NonSpacelike { u: Vec<f64> },

    #[error("normal sign is ambiguous at the anchor (support function vanishes)")]
    NormalSignAmbiguous,

    #[error("continuity orientation conflicts with time orientation at u = {u:?}")]
    TimeOrientationConflict { u: Vec<f64> },

    #[error("differencing stencil leaves the domain at u = {u:?}")]
    DomainViolation { u: Vec<f64> },

    #[error("operation requires a {0} ambient")]
    WrongAmbient(&'static str),

    #[error("mean curvature is not constant on the grid (spread {spread:e})")]
    NonConstantMeanCurvature { spread: f64 },

    #[error("homothety check needs an umbilical fixture with H != 0: {0}")]
    NotUmbilicalOrMinimal(String),

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}
