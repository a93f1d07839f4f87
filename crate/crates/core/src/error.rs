use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("treatment index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid test-treatment permutation: {0}")]
    InvalidPermutation(String),

    /// `block` is a 0-based index; the message counts from 1.
    #[error("block {} has zero size", .block + 1)]
    ZeroBlockSize { block: usize },

    #[error("information matrix is singular (design is not feasible)")]
    Singular,

    #[error("all blocks must have the same size")]
    UnequalBlockSizes,

    #[error("{family} conditions apply to {expected} designs")]
    FamilyMismatch { family: &'static str, expected: &'static str },

    #[error("no design in the {family} family exists for these parameters: {reason}")]
    EmptyFamily { family: &'static str, reason: String },

    #[error("test allocation violates {0}")]
    ConstraintViolation(String),

    #[error("contrast is not estimable under this design")]
    NonEstimable,

    #[error("cannot compare values of different criteria ({0} vs {1})")]
    CriterionMismatch(String, String),

    #[error("no admissible control replication in 0..={max}")]
    EmptyRange { max: u64 },

    #[error("design space has {count} designs, over the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("failed to sample a feasible design after {attempts} attempts")]
    SamplingFailed { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
