use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A malformed input file, pointing at the offending line (1-based).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large; field moduli must be below 2^32")]
    ModulusTooLarge(u64),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("divisor is not monic")]
    NonMonicDivisor,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid residue modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid trial parameters: {0}")]
    InvalidTrialParams(String),
    #[error("no admissible prime r found below the cap {cap} (p = {p}, ell = {ell})")]
    PrimeSearchExhausted { p: u64, ell: usize, cap: u64 },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid branching program: {0}")]
    InvalidBranchingProgram(String),
    #[error("invalid SLP: {0}")]
    InvalidSlp(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
