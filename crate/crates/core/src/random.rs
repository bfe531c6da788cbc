//! Seeded random instances.
//!
//! All randomness goes through ChaCha8 seeded with a `u64`, which is
//! portable: the same seed yields the same numbers on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frames::{default_labels, OperatorValuedFrame, VectorFrame};
use crate::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector};
use crate::povm::Povm;

pub const MAX_DIM: usize = 64;
pub const MAX_ATOMS: usize = 256;
const MAX_ATTEMPTS: usize = 1000;

pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the box `[-1, 1] × [-1, 1]i`.
pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    ComplexVector::from_vec_unchecked((0..dim).map(|_| complex(rng)).collect())
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = vector(rng, dim);
        let n = v.norm();
        if n > 1e-3 {
            return v.scale_real(1.0 / n);
        }
    }
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec_unchecked(rows, cols, (0..rows * cols).map(|_| complex(rng)).collect())
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    matrix(rng, dim, dim).hermitian_part()
}

/// `G* G` with `G` of shape `rank × dim`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    matrix(rng, rank, dim).gram().hermitian_part()
}

fn check_limits(dim: usize, atoms: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::LimitExceeded(format!("dim must be in 1..={MAX_DIM}, got {dim}")));
    }
    if atoms == 0 || atoms > MAX_ATOMS {
        return Err(Error::LimitExceeded(format!(
            "atoms must be in 1..={MAX_ATOMS}, got {atoms}"
        )));
    }
    Ok(())
}

/// `atoms` random vectors in `C^dim`, redrawn until they form a frame.
pub fn generate_frame(dim: usize, atoms: usize, seed: u64) -> Result<VectorFrame> {
    check_limits(dim, atoms)?;
    if atoms < dim {
        return Err(Error::LimitExceeded(format!(
            "{atoms} vectors cannot span C^{dim}"
        )));
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let vectors = (0..atoms).map(|_| vector(&mut rng, dim)).collect();
        let frame = VectorFrame::new(dim, vectors)?;
        if OperatorValuedFrame::from_vector_frame(&frame).is_ok() {
            return Ok(frame);
        }
    }
    Err(Error::LimitExceeded(format!(
        "no frame found in {MAX_ATTEMPTS} draws"
    )))
}

/// `atoms` random PSD elements `G_t* G_t` (each `G_t` of random rank
/// `1..=dim`), scaled so `λ_max(M(Ω)) = 1`, redrawn until framed.
pub fn generate_povm(dim: usize, atoms: usize, seed: u64) -> Result<Povm> {
    check_limits(dim, atoms)?;
    let mut rng = seeded_rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let raw: Vec<ComplexMatrix> = (0..atoms)
            .map(|_| {
                let rank = rng.gen_range(1..=dim);
                psd(&mut rng, dim, rank)
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for e in &raw {
            total.add_scaled(1.0, e);
        }
        let top = hermitian_eigen(&total.hermitian_part())?.max();
        let elements = raw.iter().map(|e| e.scale(1.0 / top)).collect();
        let povm = Povm::new(default_labels(atoms), dim, elements)?;
        if povm.is_framed().framed {
            return Ok(povm);
        }
    }
    Err(Error::LimitExceeded(format!(
        "no framed POVM found in {MAX_ATTEMPTS} draws"
    )))
}
