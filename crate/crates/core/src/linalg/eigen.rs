//! Cyclic Jacobi eigensolver for Hermitian matrices and the PSD square root
//! built on top of it.

use num_complex::Complex64;

use super::{tol_psd, ComplexMatrix, JACOBI_MAX_SWEEPS, JACOBI_OFF_DIAG_RTOL, TOL_HERM};
use crate::error::{Error, Result};

/// Eigenpairs of a Hermitian matrix: `A = U diag(λ) U*`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `U diag(f(λ)) U*`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &m) in mapped.iter().enumerate() {
                    if m != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * m;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotation `(c, s)` annihilating the real symmetric 2x2 block `[[app, b], [b, aqq]]`
/// under `Gᵀ A G` with `G = [[c, s], [-s, c]]`.
fn jacobi_rotation(app: f64, aqq: f64, b: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, t)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Pivots are visited row-major over the strict upper triangle. The sweep loop
/// stops once the off-diagonal Frobenius norm drops to `1e-14 ‖A‖_F`; more than
/// 100 sweeps is reported as `NoConvergence`. Output is bit-for-bit
/// reproducible for identical input.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.assert_square()?;
    let residual = a.hermiticity_residual();
    if residual > TOL_HERM {
        return Err(Error::NotHermitian {
            residual,
            tolerance: TOL_HERM,
        });
    }

    let mut m = a.hermitian_part();
    // eigenvectors accumulated as rows, so each rotation touches two contiguous rows
    let mut vt = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_DIAG_RTOL * m.frobenius_norm();

    let mut converged = false;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let abs_b = b.norm();
                if abs_b == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Once the diagonal has settled, entries below its resolution are noise.
                if sweep > 3 && app.abs() + 100.0 * abs_b == app.abs()
                    && aqq.abs() + 100.0 * abs_b == aqq.abs()
                {
                    m[(p, q)] = Complex64::new(0.0, 0.0);
                    m[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = b / abs_b;
                let (c, s, t) = jacobi_rotation(app, aqq, abs_b);
                // J = [[c, s·phase], [-s·conj(phase), c]] acting on columns p, q.
                let jpq = phase * s;
                let jqp = -phase.conj() * s;

                // Off the (p, q) block, rows p and q of J* M J mirror its columns.
                for k in (0..n).filter(|&k| k != p && k != q) {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    let new_p = mkp * c + mkq * jqp;
                    let new_q = mkp * jpq + mkq * c;
                    m[(k, p)] = new_p;
                    m[(k, q)] = new_q;
                    m[(p, k)] = new_p.conj();
                    m[(q, k)] = new_q.conj();
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(app - t * abs_b, 0.0);
                m[(q, q)] = Complex64::new(aqq + t * abs_b, 0.0);

                for k in 0..n {
                    let vkp = vt[(p, k)];
                    let vkq = vt[(q, k)];
                    vt[(p, k)] = vkp * c + vkq * jqp;
                    vt[(q, k)] = vkp * jpq + vkq * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, new_col)] = vt[(old_col, k)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a Hermitian matrix.
pub fn spectral_bounds(a: &ComplexMatrix) -> Result<(f64, f64)> {
    let eig = hermitian_eigen(a)?;
    Ok((eig.min(), eig.max()))
}

/// The unique Hermitian PSD square root.
///
/// Eigenvalues in `[-tol_psd, 0)` are clamped to zero first; anything more
/// negative is `NotPsd`.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a)?;
    let tol = tol_psd(a.frobenius_norm());
    if eig.min() < -tol {
        return Err(Error::NotPsd {
            eigenvalue: eig.min(),
            tolerance: tol,
        });
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()).hermitian_part())
}
