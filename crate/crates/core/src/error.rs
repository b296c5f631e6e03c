use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: malformed files, out-of-range parameters.
    Validation,
    /// The requested quantity is outside the numerically meaningful regime.
    Numerical,
    /// A checked mathematical invariant failed.
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid q parameter: {0}")]
    InvalidQ(String),
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("point is at a branch point (|z - 1/z| = {0})")]
    AtBranchPoint(String),
    #[error("weight denominator vanishes at index {index}")]
    SingularWeight { index: usize },
    #[error("probe point coincides with expansion node {node}")]
    ProbeIsNode { node: usize },
    #[error("maximal term not certified within {stored} stored coefficients")]
    TruncationTooShort { stored: usize },
    #[error("series has no tail model; the stored coefficients are treated as exact")]
    MissingTailModel,
    #[error("kappa = {kappa} exceeds central index {central}")]
    KappaExceedsN { kappa: usize, central: usize },
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("asymptotic regime not reached: {0}")]
    AsymptoticRegimeNotReached(String),
    #[error("coefficients do not decay: {0}")]
    CoefficientNotDecaying(String),
    #[error("series is not transcendental: {0}")]
    NotTranscendental(String),
    #[error("insufficient coefficients: {0}")]
    InsufficientCoefficients(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("no positive slope in Newton polygon")]
    NoPositiveSlope,
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidQ(_) | InvalidPrecision(_) | InvalidArgument(_) | Parse(_) | Io(_) | Json(_)
            | Csv(_) | MissingTailModel | ProbeIsNode { .. } | InvalidSlope(_) => {
                ErrorClass::Validation
            }
            AtBranchPoint(_)
            | SingularWeight { .. }
            | TruncationTooShort { .. }
            | KappaExceedsN { .. }
            | ZeroDenominator(_)
            | AsymptoticRegimeNotReached(_)
            | CoefficientNotDecaying(_)
            | NotTranscendental(_)
            | InsufficientCoefficients(_)
            | RegimeMismatch(_)
            | NoPositiveSlope => ErrorClass::Numerical,
            NotASolution(_) | InvariantViolation(_) => ErrorClass::Invariant,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
