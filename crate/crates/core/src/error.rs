use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One error type for the whole crate. Variants name the failed hypothesis;
/// the string carries the offending index or value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("matrix not invertible: {0}")]
    NotInvertible(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("entry outside ring: {0}")]
    EntryOutsideRing(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("gap condition violated: {0}")]
    GapViolation(String),
    #[error("divisibility condition violated: {0}")]
    DivisibilityViolation(String),
    #[error("illegal allowable step: {0}")]
    IllegalStep(String),
    #[error("matrix does not satisfy property (P): {0}")]
    NotPropertyP(String),
    #[error("family not normalizable: {0}")]
    NotNormalizable(String),
    #[error("witnesses do not reproduce the family: {0}")]
    WitnessMismatch(String),
    #[error("input block factorization does not hold: {0}")]
    InputNotFactored(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}
