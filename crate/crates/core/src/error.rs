use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not coprime to {1}")]
    NotCoprime(u64, u64),
    #[error("prime support of {0} and {1} differ")]
    BadSupport(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("size {size} exceeds limit {limit}")]
    TooLarge { size: String, limit: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} does not divide {1}")]
    NotADivisor(u64, String),
    #[error("range error: {0}")]
    RangeError(String),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("{p} is not semi-primitive modulo {k}")]
    NotSemiprimitive { p: u64, k: u64 },
    #[error("bad degree: {0}")]
    BadDegree(String),
    #[error("degenerate character: {0}")]
    DegenerateCharacter(String),
    #[error("index of <{p}> differs between moduli {k} and {k_prime}")]
    IndexUnstable { p: u64, k: u64, k_prime: u64 },
    #[error("incompatible characters: {0}")]
    IncompatibleCharacters(String),
    #[error("restriction of the character to the subfield is trivial")]
    TrivialRestriction,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("invalid H: {0}")]
    InvalidH(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("duplicate indices in lifted set")]
    DuplicateIndices,
    #[error("zero element has no cyclotomic class")]
    ZeroElement,
    #[error("non-integral division: {0}")]
    NonIntegralDivision(String),
    #[error("non-integral prediction: {0}")]
    NonIntegralPrediction(String),
    #[error("field of characteristic 2 has no skew-Hadamard difference sets")]
    EvenField,
    #[error("q = {0} is not 1 mod 4")]
    BadResidue(u64),
    #[error("spec is symbolic (q = {0}); numeric verification refused")]
    Symbolic(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheckMismatch(String),
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Size-class errors map to their own CLI exit code.
    pub fn is_size_error(&self) -> bool {
        matches!(self, Error::TooLarge { .. } | Error::Symbolic(_))
    }
}
