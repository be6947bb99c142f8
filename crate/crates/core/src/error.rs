use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in F_{modulus}")]
    DivisionByZero { modulus: u32 },
    #[error("all input vectors are zero")]
    ZeroSpan,
    #[error("summands are not in direct position (rank {got}, expected {expected})")]
    NotDirect { got: usize, expected: usize },
    #[error("vectors do not form a basis of their span")]
    NotABasis,
    #[error("apartment symbol is not a basis of the target space")]
    InvalidApartment,
    #[error("matrix is singular")]
    Singular,
    #[error("requested computation exceeds the enforced budget: {0}")]
    TooLarge(String),
    #[error("d^2 != 0 at basis element `{witness}` (degree {degree})")]
    NotAComplex { degree: isize, witness: String },
    #[error("homotopy counterexample at `{witness}`: {detail}")]
    CounterexampleFound { witness: String, detail: String },
    #[error("cache entry is corrupt: {0}")]
    CorruptCache(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
