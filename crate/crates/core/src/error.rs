use thiserror::Error;

use crate::instance::ElementId;

/// Every failure the library can report.
///
/// Solver "no solution" outcomes are not errors; they are `Ok(None)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("plurality function is undefined on class {0:?}")]
    PartialPlurality(Vec<ElementId>),
    #[error("brute-force oracle refuses {sets} sets (limit {limit})")]
    OracleTooLarge { sets: usize, limit: usize },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("quota {0} is not 1 or 2")]
    QuotaInvalid(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("oracle solution is inconsistent with the tuple: {0}")]
    OracleInconsistent(String),
    #[error("no coloring trial separates the oracle solution ({trials} trials)")]
    NoColoringSeparates { trials: usize },
    #[error("constraint graph is not 3-regular: variable {var} has degree {degree}")]
    NotThreeRegular { var: usize, degree: usize },
    #[error("target {target} exceeds column sum {column_sum} in dimension {dim}")]
    TargetExceedsColumnSum {
        dim: usize,
        target: u64,
        column_sum: u64,
    },
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("assignment enumeration budget exceeded: {0}")]
    EnumerationBudgetExceeded(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "MalformedInput",
            Error::Validation(_) => "ValidationError",
            Error::UnknownElement(_) => "UnknownElement",
            Error::PartialPlurality(_) => "PartialPlurality",
            Error::OracleTooLarge { .. } => "OracleTooLarge",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::QuotaInvalid(_) => "QuotaInvalid",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::OracleInconsistent(_) => "OracleInconsistent",
            Error::NoColoringSeparates { .. } => "NoColoringSeparates",
            Error::NotThreeRegular { .. } => "NotThreeRegular",
            Error::TargetExceedsColumnSum { .. } => "TargetExceedsColumnSum",
            Error::ParameterViolation(_) => "ParameterViolation",
            Error::EnumerationBudgetExceeded(_) => "EnumerationBudgetExceeded",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
