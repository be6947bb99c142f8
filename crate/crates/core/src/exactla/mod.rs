//! Exact arithmetic over small prime fields and the rationals, with the
//! dense/sparse matrix kernels everything else reduces to.

mod dense;
mod field;
mod io;
mod sparse;

pub use dense::{reduced_column_echelon, DenseMat};
pub use field::{Coeff, PrimeField, MAX_PRIME};
pub use io::{read_sparse_file, write_sparse_file};
pub use sparse::SparseIntMat;
