use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid block shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("element is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue {eigenvalue:.6e} outside the domain of the function")]
    SpectrumOutOfDomain { eigenvalue: f64 },

    #[error("invalid seminorm chain: {0}")]
    InvalidChain(String),

    #[error("level {level} out of range 1..={levels}")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("elements live over different seminorm chains")]
    ChainMismatch,

    #[error("module space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("element is not a member of the projective module (residual {residual:.3e})")]
    NotMember { residual: f64 },

    #[error("not a projection: {0}")]
    NotAProjection(String),

    #[error("operator is not invertible (smallest singular value {min_singular:.3e})")]
    NotInvertible { min_singular: f64 },

    #[error("operator is not positive and invertible: {0}")]
    NotPositiveInvertible(String),

    #[error("not a frame: lower bound {lower:.6e} vs upper bound {upper:.6e}")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("internal verification failed: {0}")]
    VerificationFailure(String),

    #[error("frames have different multiplier counts ({left} vs {right})")]
    CountMismatch { left: usize, right: usize },

    #[error("cross-validation needs every block of every level to have size 1")]
    NotScalarLevels,
}
