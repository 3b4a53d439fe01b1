use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SVD did not converge after {sweeps} sweeps")]
    FactorizationFailure { sweeps: usize },

    #[error("rank-deficient input: singular value {index} is {value:e}")]
    RankDeficient { index: usize, value: f64 },

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is not an orthogonal projection: {0}")]
    NotAProjection(String),

    #[error("ill-conditioned projection: singular value {value:e} is neither 0 nor 1")]
    IllConditionedProjection { value: f64 },

    #[error("zero projection has no minimal angle")]
    ZeroProjection,

    #[error("tolerance conflict: {0}")]
    ToleranceConflict(String),

    #[error("relation undefined: {0}")]
    UndefinedRelation(String),

    #[error("input outside map domain: {0}")]
    Domain(String),

    #[error("selector contract violated: {0}")]
    SelectorContract(String),

    #[error("preserver hypothesis violated: {0}")]
    PreserverViolation(String),

    #[error("line map is not induced by an isometry: {0}")]
    NotWignerMap(String),

    #[error("regime precondition violated: {0}")]
    Regime(String),

    #[error("certificate failed: {0}")]
    CertificateFailure(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
