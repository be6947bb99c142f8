//! Steinberg and apartment monoids over finite fields, with the chain-level
//! machinery (bar, Koszul, Sharbly, Lee-Szczarba, Tits buildings, Y_n) needed
//! to verify their structural dimension statements by exact linear algebra.

pub mod error;
pub mod exactla;
pub mod steinberg;
pub mod subspaces;
pub(crate) mod veclin;

pub use error::{Error, Result};
pub use exactla::{Coeff, DenseMat, PrimeField, SparseIntMat};
pub use steinberg::{PbwIndex, SteinbergElement};
pub use subspaces::{Decomposition, Line, Subspace};

/// Version stamp written into cache manifests and reports; bumping it
/// invalidates every cache entry.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
