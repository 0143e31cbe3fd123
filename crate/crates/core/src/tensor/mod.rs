//! Dense complex linear algebra for small Hilbert spaces.

mod eigen;
mod matrix;
mod subsystem;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{pauli, ComplexMatrix, C64, MAX_DIM};
pub(crate) use matrix::{ONE, ZERO};
pub use subsystem::{partial_trace, partial_transpose, permute_subsystems, DimFactorization};
