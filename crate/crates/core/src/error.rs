use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("horizon exceeded: {0}")]
    HorizonExceeded(String),
    #[error("word length unsupported: {0}")]
    LengthUnsupported(String),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("invalid theta: {0}")]
    InvalidTheta(String),
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("centrality violation in {class}: coefficient {first_value} at {first} but {second_value} at {second}")]
    CentralityViolation {
        class: String,
        first: String,
        first_value: String,
        second: String,
        second_value: String,
    },
    #[error("modular element unavailable: ring is not flagged Kac")]
    RegimeUnavailable,
    #[error("incomplete data: {0}")]
    Incomplete(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by a finite horizon rather than bad input.
    pub fn is_horizon(&self) -> bool {
        matches!(
            self,
            Error::HorizonExceeded(_) | Error::LengthUnsupported(_) | Error::Incomplete(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
