use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A distribution or configuration that violates its invariants.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    /// Non-finite or otherwise malformed data handed to an estimator.
    #[error("data error: {0}")]
    Data(String),
    #[error("bid {bid} exceeds remaining budget {budget}")]
    Infeasible { bid: f64, budget: f64 },
    /// A policy received feedback of the wrong kind (censored vs. full).
    #[error("feedback mode error: {0}")]
    Mode(String),
    #[error("phase schedule error: round {0} is not a phase boundary")]
    Schedule(u64),
    #[error(
        "instance too large for exhaustive enumeration: {nodes} decision nodes (limit {limit})"
    )]
    TooLarge { nodes: u64, limit: u64 },
    /// A policy broke the engine contract (bid outside `[0, 1]` or above budget).
    #[error("contract violation at round {round}: {detail}")]
    ContractViolation { round: u64, detail: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
