use thiserror::Error;

use crate::operators::OperatorKind;
use crate::parser::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("interval too large: {free} free atoms exceed the cap of {cap}")]
    IntervalTooLarge { free: usize, cap: usize },

    #[error("domain too large: {size} atoms exceed the cap of {cap}")]
    DomainTooLarge { size: usize, cap: usize },

    #[error("signature too large: {size} atoms exceed the cap of {cap}")]
    SignatureTooLarge { size: usize, cap: usize },

    #[error("state cap exceeded: more than {cap} visited sets")]
    StateCapExceeded { cap: usize },

    #[error("level-map search too large: {size} atoms exceed the cap of {cap}")]
    LevelSearchTooLarge { size: usize, cap: usize },

    #[error("invalid choice atom: {0}")]
    InvalidAtom(String),

    #[error("non-emptiness assumption violated: {operator} {bound} image is empty at {pair}")]
    AssumptionViolation {
        operator: OperatorKind,
        bound: &'static str,
        pair: String,
    },

    #[error("non-emptiness assumption violated: no set satisfies every applicable head at {at}")]
    HeadInconsistent { at: String },

    #[error("the GZ operator is only defined on consistent pairs, got {pair}")]
    InconsistentPair { pair: String },

    #[error("interpretation {pair} is not consistent")]
    NotConsistent { pair: String },

    #[error("program is not normal")]
    NotNormal,

    #[error("program has a non-monotone head")]
    NonMonotoneHead,

    #[error("the ultimate operator has no head-set form")]
    NoHeadSet,

    #[error("the GZ upper bound operator is only usable for total stable fixpoints")]
    GzUpperUnsupported,

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("disjunctive heads cannot be mixed with choice constructs (line {line})")]
    DialectMix { line: usize },

    #[error("{0}")]
    Json(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Errors raised by an exceeded size guard.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::IntervalTooLarge { .. }
                | Error::DomainTooLarge { .. }
                | Error::SignatureTooLarge { .. }
                | Error::StateCapExceeded { .. }
                | Error::LevelSearchTooLarge { .. }
        )
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Json(_))
    }
}
