use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty subsystem selection")]
    EmptySubsystem,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("size cap exceeded: {what} = {size} > {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("the Wigner representation needs an odd prime local dimension, got {0}")]
    WignerRequiresOddPrime(u32),
    #[error("generators do not commute")]
    NonCommutingGenerators,
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("phase assignment does not produce a quantum state: {0}")]
    InvalidPhase(String),
    #[error("stabilizer support is not an isotropic subgroup: {0}")]
    GroupStructure(String),
    #[error("numerical tolerance violated: {0}")]
    NumericalTolerance(String),
    #[error("invalid Renyi order {0}")]
    InvalidOrder(f64),
    #[error("invalid convolution parameters s={s}, t={t} for d={d}")]
    InvalidParams { d: u32, s: u32, t: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
