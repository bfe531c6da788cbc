#![allow(dead_code)]

use std::f64::consts::PI;

use framekit::frames::{OperatorValuedFrame, VectorFrame};
use framekit::linalg::{ComplexMatrix, ComplexScalar, ComplexVector};
use framekit::povm::Povm;

pub fn real_frame(dim: usize, vectors: &[&[f64]]) -> OperatorValuedFrame {
    let vs = vectors.iter().map(|v| ComplexVector::from_real(v)).collect();
    OperatorValuedFrame::from_vector_frame(&VectorFrame::new(dim, vs).unwrap()).unwrap()
}

pub fn e1_e1_e2() -> OperatorValuedFrame {
    real_frame(2, &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])
}

/// Unit vectors at 0°, 120°, 240°.
pub fn equiangular_vectors() -> Vec<ComplexVector> {
    (0..3)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 3.0;
            ComplexVector::from_real(&[a.cos(), a.sin()])
        })
        .collect()
}

pub fn equiangular_triple() -> OperatorValuedFrame {
    OperatorValuedFrame::from_vector_frame(&VectorFrame::new(2, equiangular_vectors()).unwrap()).unwrap()
}

/// Characters `j ↦ ω^{jk}` of `Z_n`, each with weight `1/n`.
pub fn fourier_frame(n: usize) -> OperatorValuedFrame {
    let samples: Vec<ComplexVector> = (0..n)
        .map(|k| {
            ComplexVector::new(
                (0..n)
                    .map(|j| ComplexScalar::from_polar(1.0, 2.0 * PI * (j * k) as f64 / n as f64))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    OperatorValuedFrame::discretize_continuous(&samples, &vec![1.0 / n as f64; n]).unwrap()
}

pub fn projective_qubit() -> Povm {
    Povm::new(
        vec!["0".into(), "1".into()],
        2,
        vec![
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
        ],
    )
    .unwrap()
}

pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}
