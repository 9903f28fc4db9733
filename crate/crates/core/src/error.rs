use thiserror::Error;

use crate::freegroup::Word;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {0:?}: {1}")]
    ParseWord(String, String),

    #[error("ball of radius {radius} has {size} elements, over the budget of {budget}")]
    BallBudget { radius: usize, size: u128, budget: u128 },

    #[error("not left-connected: {0}")]
    NotLeftConnected(String),

    #[error("configuration is undefined at {0}")]
    MissingCoordinate(Word),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),

    #[error("generator index {0} is out of range")]
    UnknownGenerator(usize),

    #[error("mismatched data: {0}")]
    Mismatch(String),

    #[error("class of symbol {0} is periodic")]
    PeriodicClass(String),

    #[error("specialness violated: {0}")]
    NotSpecial(String),

    #[error("exact enumeration exceeded its budget of {0} cylinders")]
    EnumerationBudget(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("oracle does not have bounded lookahead")]
    UnboundedOracle,

    #[error("pipeline stopped short of a generator-ergodic measure: {0}")]
    Pipeline(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
