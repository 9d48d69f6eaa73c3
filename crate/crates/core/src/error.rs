use thiserror::Error;

use crate::valuations::ValidityViolation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown good g{0}")]
    UnknownGood(usize),

    #[error("good g{good} is already in the bundle")]
    GoodInBundle { good: usize },

    #[error("good g{good} is not in the bundle")]
    GoodNotInBundle { good: usize },

    #[error("agent {agent} has non-positive weight {weight}")]
    NonPositiveWeight { agent: usize, weight: String },

    #[error("instance needs at least one agent")]
    NoAgents,

    #[error("agent {agent}: invalid valuation: {violation}")]
    InvalidValuation {
        agent: usize,
        violation: ValidityViolation,
    },

    #[error("malformed valuation: {0}")]
    MalformedValuation(String),

    #[error("explicit table valuations support at most {max} goods, got {m}")]
    TableTooLarge { m: usize, max: usize },

    #[error("allocation is invalid: {0}")]
    InvalidAllocation(String),

    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: String },

    #[error("cannot parse rational from {0:?}")]
    BadRational(String),

    #[error("agent {agent} does not have a matroid-rank valuation")]
    NotMatroidRank { agent: usize },

    #[error("objective precondition violated: {0}")]
    Precondition(String),

    #[error("search space of {states} states exceeds the budget of {budget}")]
    BudgetExceeded { states: String, budget: u64 },

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("unsupported generator request: {0}")]
    UnsupportedGenerator(String),

    #[error("augmentation produced an invalid allocation: {0}")]
    Augmentation(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
