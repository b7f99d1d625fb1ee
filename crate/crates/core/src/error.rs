use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid diagram: series {series} does not admit rank {rank}")]
    InvalidDiagram { series: String, rank: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("structure constants are inconsistent: {0}")]
    SignInconsistency(String),

    #[error("element {0} is not ad-nilpotent; use a toral flow")]
    NotNilpotent(String),

    #[error("element {0} is not a Cartan generator")]
    NotToral(String),

    #[error("toral flow parameter must be nonzero")]
    ZeroToralParameter,

    #[error("Weyl conjugator search exhausted at word length {0}")]
    SearchExhausted(usize),

    #[error("prime {0} divides a denominator")]
    BadPrime(u64),

    #[error("exhausted {0} primes without finding one coprime to all denominators")]
    PrimeRetriesExceeded(usize),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("symbolic expansion needs {found} variables; the cap is {cap}")]
    SymbolicCapExceeded { found: usize, cap: usize },

    #[error("a negative power of a non-monomial polynomial is not a Laurent polynomial")]
    NotLaurent,

    #[error("sampler could not produce a valid sample: {0}")]
    SamplerExhausted(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
