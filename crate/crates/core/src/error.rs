use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by the lattice computations.
///
/// Everything except [`Error::InvariantViolation`] signals bad input;
/// `InvariantViolation` means an internal identity failed to hold and is a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix data has {actual} entries, expected {rows}x{cols}")]
    BadShape {
        rows: usize,
        cols: usize,
        actual: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("exterior degree {k} out of range for rank {rank}")]
    ExteriorDegreeOutOfRange { k: usize, rank: usize },
    #[error("negative input {0}")]
    NegativeInput(BigInt),
    #[error("invariant factors must be >= 1 and form a divisibility chain: {0}")]
    InvalidChain(String),
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(BigInt),
    #[error("kernel exponent does not divide n = {n}")]
    NotAnnihilatedByN { n: BigInt },
    #[error("degree {degree} is not a perfect square")]
    NotPrincipal { degree: BigInt },
    #[error("genus {genus} is too small, need g >= 2")]
    GenusTooSmall { genus: usize },
    #[error("{p} is not prime")]
    NotPrime { p: BigInt },
    #[error("prime {p} divides {value}")]
    NotCoprime { p: BigInt, value: BigInt },
    #[error("{count} targets exceed genus {genus}")]
    TooManyTargets { count: usize, genus: usize },
    #[error("target {target} does not divide modulus {n}")]
    TargetNotDivisor { target: BigInt, n: BigInt },
    #[error("matrix is not antisymmetric modulo {n}")]
    NotAntisymmetric { n: BigInt },
    #[error("graph is not isotropic modulo {n}")]
    NotIsotropic { n: BigInt },
    #[error("cocycle table has {actual} entries, expected {expected}")]
    TableSizeMismatch { expected: usize, actual: usize },
    #[error("bilinear form is not well defined on (Z/{m})^k with values mod {n}")]
    NotWellDefined { m: BigInt, n: BigInt },
    #[error("J does not square to -I")]
    NotComplexStructure,
    #[error("invalid B-field: {0}")]
    InvalidBField(String),
    #[error("rank {rank} is too small, need at least {min}")]
    RankTooSmall { rank: usize, min: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
