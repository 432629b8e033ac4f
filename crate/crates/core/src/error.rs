use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse rational {0:?} (expected \"p/q\" or an integer)")]
    ParseRat(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mechanism index {0} outside [0, 8191]")]
    IndexOutOfRange(u32),
    #[error("mechanism {0} is not forcing: a requested test with no report must assign 0")]
    NotForcing(u16),
    #[error("mechanism {0} is not incentive compatible")]
    NotIncentiveCompatible(u16),
    #[error("invalid mechanism record: {0}")]
    InvalidMechanism(String),
    #[error("invalid agent strategy record: {0}")]
    InvalidStrategy(String),
    #[error("grid is empty")]
    EmptyGrid,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
