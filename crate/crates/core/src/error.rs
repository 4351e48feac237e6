use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UqError {
    #[error("probability vector is empty")]
    EmptyVector,
    #[error("a categorical distribution needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("cannot renormalize a vector with total mass {sum}")]
    ZeroMass { sum: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("input is empty")]
    EmptyInput,
    #[error("length mismatch: {losses} losses but permutation of length {perm}")]
    LengthMismatch { losses: usize, perm: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("instance loss {index} is invalid ({value})")]
    InvalidLoss { index: usize, value: f64 },
    #[error("brute force over {0}! permutations refused (n must be <= 8)")]
    TooLarge(usize),
    #[error("{side} score set is empty")]
    EmptySide { side: &'static str },
    #[error("score {index} on the {side} side is not finite")]
    NonFiniteScore { side: &'static str, index: usize },
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("training set is empty")]
    EmptyTrain,
    #[error("batch of {requested} exceeds available pool of {available}")]
    BatchTooLarge { requested: usize, available: usize },
    #[error("index {0} appears in more than one split")]
    SplitOverlap(usize),
    #[error("index {index} out of range for dataset of {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, UqError>;
