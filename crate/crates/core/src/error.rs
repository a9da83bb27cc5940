use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be odd and positive")]
    InvalidModulus,
    #[error("value is not a quadratic residue")]
    NonResidue,
    /// A value shared a nontrivial factor with the modulus. The factor itself is
    /// never carried in the error.
    #[error("operation hit a value sharing a factor with the modulus")]
    FactorLeak,
    #[error("invalid key material: {0}")]
    InvalidKey(String),
    #[error("message cannot be signed: redundancy output is zero or not a unit")]
    Unsignable,
    #[error("value is not invertible modulo N")]
    NotInvertible,
    #[error("{0} is not supported by this key")]
    WrongKeyKind(&'static str),
    #[error("gave up after {0} attempts")]
    RetriesExhausted(usize),
    #[error("redundancy {0} cannot be applied to this message")]
    RedundancyMismatch(String),
    #[error("transform does not apply to {0} signatures")]
    SchemeMismatch(&'static str),
    #[error("blind session step out of order: {0}")]
    ProtocolOrder(&'static str),
    #[error("oracle refused: {0}")]
    OracleRefused(String),
    #[error("ring too large for exhaustive enumeration")]
    RingTooLarge,
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
