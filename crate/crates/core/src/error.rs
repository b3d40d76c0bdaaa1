use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: size {left} vs size {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("letter {letter} out of range for alphabet of size {size}")]
    LetterOutOfRange { letter: u32, size: usize },

    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,

    #[error("the empty word has no periodic extension")]
    EmptyWord,

    #[error("enumerating {requested} words exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point cloud must be non-empty")]
    EmptyCloud,

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid comparison function: {0}")]
    InvalidComparison(String),

    #[error("negative argument {0} to comparison function")]
    NegativeArgument(f64),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("linear system is singular")]
    Singular,

    #[error("fixed-point iteration exhausted {iterations} steps (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },

    #[error("attractor iteration did not converge")]
    AttractorNotConverged,

    #[error("invariant superset check failed: residual {residual:e} exceeds {bound:e}")]
    InvarianceViolated { residual: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
