use thiserror::Error;

/// Errors raised by the measure-space and operator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("EmptySpace: a measure space needs at least one atom")]
    EmptySpace,
    #[error("NonPositiveWeight: atom {atom} has weight {weight}")]
    NonPositiveWeight { atom: usize, weight: f64 },
    #[error("DuplicateAtom: atom id {0} appears more than once")]
    DuplicateAtom(usize),
    #[error("NotAPartition: {0}")]
    NotAPartition(String),
    #[error("ZeroMeasureBlock: block {0} has zero total mass")]
    ZeroMeasureBlock(usize),
    #[error("InvalidExponent: {0}")]
    InvalidExponent(String),
    #[error("ExponentMismatch: 1/{p} + 1/{q} != 1")]
    ExponentMismatch { p: f64, q: f64 },
    #[error("SpaceMismatch: expected {expected} atoms, found {found}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("LevelOutOfRange: level {level} not in 1..={levels}")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("InvalidLadder: {0}")]
    InvalidLadder(String),
    #[error("LadderTooShort: {levels} levels, need at least {needed}")]
    LadderTooShort { levels: usize, needed: usize },
    #[error("NegativeDensity: density at atom {atom} is {value}")]
    NegativeDensity { atom: usize, value: String },
    #[error("WrongGalleryFamily: expected {expected}, found {found}")]
    WrongGalleryFamily { expected: &'static str, found: &'static str },
    #[error("NoSuchN: no truncation level brings the tail below {eps}")]
    NoSuchN { eps: f64 },
    #[error("NotConvergent: {0}")]
    NotConvergent(String),
    #[error("NonRealComparison: ordering requested for non-real data")]
    NonRealComparison,
    #[error("HorizonTooSmall: horizon {horizon} < k_max {k_max}")]
    HorizonTooSmall { horizon: usize, k_max: usize },
    #[error("PreconditionNot2Expansive: operator is not 2-expansive")]
    PreconditionNot2Expansive,
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
