//! Dense complex linear algebra used by every other module.
//!
//! Everything here is a pure function of its input: no caching, no
//! threading, and bit-identical output for identical input.

mod eigen;
mod inverse;
mod matrix;
mod vector;

pub use eigen::{hermitian_eigen, psd_sqrt, spectral_bounds, EigenDecomposition};
pub use inverse::invert;
pub use matrix::ComplexMatrix;
pub use vector::ComplexVector;

pub use num_complex::Complex64 as ComplexScalar;

/// Relative Hermiticity tolerance: `‖A − A*‖_F ≤ TOL_HERM · ‖A‖_F`.
pub const TOL_HERM: f64 = 1e-10;

/// Relative tolerance for eigen reconstructions and product checks.
pub const TOL_EIG: f64 = 1e-10;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Jacobi stops once `off(A) ≤ JACOBI_OFF_DIAG_RTOL · ‖A‖_F`.
pub const JACOBI_OFF_DIAG_RTOL: f64 = 1e-14;

/// Eigenvalues above `-tol_psd(‖A‖_F)` count as non-negative.
pub fn tol_psd(frobenius_norm: f64) -> f64 {
    1e-10 * (1.0 + frobenius_norm)
}

/// Smallest admissible singular/eigen magnitude for `invert`.
pub fn tol_inv(frobenius_norm: f64) -> f64 {
    1e-12 * frobenius_norm
}
