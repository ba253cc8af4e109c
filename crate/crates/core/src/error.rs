use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("character index {0} is trivial modulo the characteristic")]
    TrivialCharacter(u64),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("points or elements belong to different curves or extensions")]
    DomainMismatch,

    #[error("{what}: size {size} exceeds the enumeration budget {limit}")]
    ScaleLimit { what: String, size: u64, limit: u64 },

    #[error("singular Weierstrass equation")]
    Singular,

    #[error("supersingular: out of scope (trace {trace} divisible by p)")]
    Supersingular { trace: i64 },

    #[error("ideal of norm {norm} shares a factor with the conductor {conductor}")]
    ConductorCollision { norm: u64, conductor: u64 },

    #[error("element is not invertible modulo the ideal")]
    NotInvertible,

    #[error("denominator {denominator} is not invertible modulo the point order {order}")]
    DenominatorCollision { denominator: u64, order: u64 },

    #[error("endomorphism ring not certified: conductor only known to divide {conductor_bound}")]
    UncertifiedRing { conductor_bound: u64 },

    #[error("{0} is not an element of the endomorphism ring")]
    NotInRing(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("independent computations disagree: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn scale(what: impl Into<String>, size: u64, limit: u64) -> Self {
        Error::ScaleLimit { what: what.into(), size, limit }
    }
}
