use num_complex::Complex64;

use super::{hermitian_eigen, tol_inv, ComplexMatrix, TOL_HERM};
use crate::error::{Error, Result};

/// Inverse of a square matrix.
///
/// Hermitian input goes through the eigendecomposition, where the smallest
/// eigenvalue magnitude is exactly the smallest singular value. Other input
/// uses Gauss-Jordan elimination with partial pivoting and checks the
/// smallest pivot instead.
pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.assert_square()?;
    let tol = tol_inv(a.frobenius_norm());
    if a.hermiticity_residual() <= TOL_HERM {
        let eig = hermitian_eigen(a)?;
        let smallest = eig
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(f64::INFINITY, f64::min);
        if smallest <= tol {
            return Err(Error::Singular {
                magnitude: smallest,
                tolerance: tol,
            });
        }
        return Ok(eig.map_spectrum(|l| 1.0 / l).hermitian_part());
    }
    gauss_jordan(a, n, tol)
}

fn gauss_jordan(a: &ComplexMatrix, n: usize, tol: f64) -> Result<ComplexMatrix> {
    let mut work = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    let mut smallest = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| work[(i, col)].norm().total_cmp(&work[(j, col)].norm()))
            .expect("non-empty range");
        let magnitude = work[(pivot_row, col)].norm();
        smallest = smallest.min(magnitude);
        if magnitude <= tol {
            return Err(Error::Singular {
                magnitude,
                tolerance: tol,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                let tmp = work[(col, k)];
                work[(col, k)] = work[(pivot_row, k)];
                work[(pivot_row, k)] = tmp;
                let tmp = inv[(col, k)];
                inv[(col, k)] = inv[(pivot_row, k)];
                inv[(pivot_row, k)] = tmp;
            }
        }
        let pivot_inv = Complex64::new(1.0, 0.0) / work[(col, col)];
        for k in 0..n {
            work[(col, k)] *= pivot_inv;
            inv[(col, k)] *= pivot_inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[(row, col)];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..n {
                let w = work[(col, k)];
                let v = inv[(col, k)];
                work[(row, k)] -= factor * w;
                inv[(row, k)] -= factor * v;
            }
        }
    }
    debug_assert!(smallest > tol);
    Ok(inv)
}
