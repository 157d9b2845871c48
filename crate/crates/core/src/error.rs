use thiserror::Error;

/// Errors raised by the algebra, protocol and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("particle index {index} out of range for a {n_particles}-particle register")]
    InvalidParticle { index: usize, n_particles: usize },

    #[error("particle count {0} not supported (1..=3)")]
    UnsupportedParticleCount(usize),

    #[error("axis ({x}, {y}, {z}) is not a unit vector (norm {norm})")]
    NonUnitAxis { x: f64, y: f64, z: f64, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("tensor product of {left} and {right} particles exceeds the 3-particle limit")]
    DimensionOverflow { left: usize, right: usize },

    #[error("non-finite amplitude encountered")]
    NonFinite,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator result has zero norm")]
    ZeroNorm,

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("source stream is empty")]
    EmptyStream,

    #[error("invalid scattering frame: {0}")]
    InvalidFrame(String),

    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("left/right counts sum to zero")]
    ZeroTotal,

    #[error("timestamp stream is not sorted at position {0}")]
    Unsorted(usize),

    #[error("rotation does not permute the triplet Bell states: {0}")]
    NotAPermutation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
