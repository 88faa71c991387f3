use thiserror::Error;

pub type Result<T> = std::result::Result<T, PirError>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PirError {
    #[error("{0} is not prime")]
    NonPrimeFactor(u64),
    #[error("prime {0} appears more than once")]
    DuplicatePrime(u64),
    #[error("modulus overflow: {0}")]
    Overflow(String),
    #[error("exponent must be at least 1 (prime {0})")]
    ZeroExponent(u64),
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(u64, u64),
    #[error("operands live in different ambient rings")]
    MixedAmbient,
    #[error("{0}^{1} is not a factor of the modulus")]
    UnknownComponent(u64, u32),
    #[error("component mismatch: {0}")]
    ComponentMismatch(String),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("tower entry {0} does not divide entry {1}")]
    BrokenTower(usize, usize),
    #[error("tower entry {0} does not divide x^n - 1")]
    NotADivisor(usize),
    #[error("tower entry {0} is not monic")]
    NotMonic(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCountMismatch { expected: usize, got: usize },
    #[error("codes live in different ambient spaces")]
    AmbientMismatch,
    #[error("sample set is empty: {0}")]
    EmptySampleSet(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no compliant instance found after {0} attempts")]
    NoCompliantInstance(usize),
    #[error("incompatible dimensions: {0}")]
    IncompatibleDimensions(String),
    #[error("file index {0} out of range 1..={1}")]
    InvalidFileIndex(usize, usize),
    #[error("no solution while recovering row {row}, column {col}")]
    NoSolution { row: usize, col: usize },
    #[error("ambiguous solution while recovering row {row}, column {col}")]
    AmbiguousSolution { row: usize, col: usize },
    #[error("instance is not protocol compliant: {0}")]
    NonCompliant(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PirError {
    fn from(e: std::io::Error) -> Self {
        PirError::Io(e.to_string())
    }
}
