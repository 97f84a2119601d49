use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requested enclosure width unreachable within {max_bits} bits of working precision")]
    PrecisionFailure { max_bits: u32 },

    #[error("basis is singular")]
    SingularBasis,

    #[error("matrix is singular")]
    Singular,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("generator {label} has determinant {det}, expected 1")]
    DeterminantNotOne { label: String, det: String },

    #[error("configuration has duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("list must be nonempty")]
    EmptyList,

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("element is not loxodromic")]
    NotLoxodromic,

    #[error("fixed points are not inside the prescribed neighbourhoods: {0}")]
    MisalignedFixedPoints(String),

    #[error("no contracting power found up to N = {n_max}")]
    ExceededNMax { n_max: u32 },

    #[error("no loxodromic element found within word radius {radius}")]
    NoneFoundWithinRadius { radius: usize },

    #[error("search exhausted after {tries} tries: {diagnostic}")]
    ExhaustedTries { tries: usize, diagnostic: String },

    #[error("points have zero separation (indices {0} and {1} coincide)")]
    ZeroSeparation(usize, usize),

    #[error("set descriptors of different kinds cannot be combined")]
    MixedKinds,

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
