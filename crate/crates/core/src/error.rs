use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability data: {0}")]
    InvalidProbability(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: usize },
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("support violation: p has mass where q vanishes")]
    SupportViolation,
    #[error("value is infinite")]
    InfiniteValue,
    #[error("no subset satisfies the mass constraint")]
    NoFeasibleSubset,
    #[error("support of size {dim} is too large for exact search (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("search space of {size} codebooks exceeds budget {budget}")]
    SearchSpaceTooLarge { size: u128, budget: u64 },
    #[error("no codebook achieves the requested success probability")]
    NoFeasibleCodebook,
    #[error("work distribution needs {atoms} atoms, budget is {budget}")]
    AtomBudgetExceeded { atoms: u128, budget: usize },
    #[error("no work value is deterministic at the requested precision")]
    NoDeterministicValue,
    #[error("marginal has zero entries at {0:?}")]
    ZeroMarginal(Vec<usize>),
    #[error("channel composition is not square ({0} -> {1})")]
    NonSquare(usize, usize),
    #[error("iteration did not converge: bracket [{lower}, {upper}]")]
    NonConvergence { lower: f64, upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
