use thiserror::Error;

/// Errors shared across the crate.
///
/// `BudgetExceeded` is the only variant that maps to a distinct process exit
/// code in the CLI; everything else is a precondition violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be >= 1")]
    BadExtensionDegree,
    #[error("field too large: p^k must fit in 40 bits, got p={p}, k={k}")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("inverse of zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("square root only canonical over the element's own field")]
    WrongField,
    #[error("operation requires characteristic {needed}, field has characteristic {got}")]
    CharMismatch { needed: u64, got: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("mismatched context: {0}")]
    ContextMismatch(String),
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("truncation order {have} too small, need at least {need}")]
    InsufficientPrecision { need: u32, have: u32 },
    #[error("enumeration budget exceeded: needed {needed} points, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("section needs e <= n, got e={e}, n={n}")]
    TooManyComponents { e: u32, n: u32 },
    #[error("degree {degree} not divisible by p={p}")]
    DegreeNotDivisible { degree: u32, p: u64 },
    #[error("quadratic form obstruction over the base field: {0}")]
    QfObstruction(String),
    #[error("Milnor number not finite within cap {cap}")]
    InfiniteMilnor { cap: u32 },
    #[error("invalid input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
