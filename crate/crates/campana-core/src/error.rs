use thiserror::Error;

/// Errors shared across the crate.
///
/// Domain errors (bad mathematical input) are kept separate from resource
/// errors (budget, overflow) so the CLI can map them to distinct exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("argument must be nonzero")]
    ZeroArgument,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{x} is not {m}-full: prime {witness} divides it only {valuation} time(s)")]
    NotMFull {
        x: i64,
        m: u32,
        witness: u64,
        valuation: u32,
    },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid orbifold data: {0}")]
    InvalidOrbifold(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series diverges for these exponents: {0}")]
    DivergentSeries(String),

    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("cross-check disagreement: {0}")]
    NumericalDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 2 usage, 3 domain,
    /// 4 budget/resource, 5 numerical disagreement.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::BudgetExceeded(_) | Error::Overflow(_) => 4,
            Error::NumericalDisagreement(_) => 5,
            _ => 3,
        }
    }
}
