use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not a unit")]
    NonUnit,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular over the ring")]
    SingularOverRing,
    #[error("matrix is not cyclic")]
    NotCyclic,
    #[error("element does not lie in H(R)G_tau(R)")]
    NotInProduct,
    #[error("enumeration of {needed} elements exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("operation requires 2 to be a unit")]
    CharacteristicTwo,
    #[error("representation data do not form a stable pair")]
    NotStablePair,
    #[error("no noncompact-support witness found")]
    WitnessSearchFailed,
    #[error("character extension failed: {0}")]
    ExtensionFailed(String),
    #[error("element is not congruent to 1 modulo q")]
    NotInCongruenceSubgroup,
    #[error("degenerate instance: a lies in HZ")]
    DegenerateInstance,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
