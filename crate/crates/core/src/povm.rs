//! POVMs on finite measurable spaces.
//!
//! A POVM here is one PSD matrix `M({t})` per atom; the value on an event is
//! the sum over its atoms, so `M(∅) = 0` and finite additivity hold by
//! construction. The validator still checks the axioms numerically, and it
//! does so through [`OperatorMeasure`] so that arbitrary set functions
//! (including deliberately broken ones) can be put through the same checks.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{check_unique_labels, tol_frame};
use crate::linalg::{hermitian_eigen, psd_sqrt, invert, tol_psd, ComplexMatrix, ComplexVector, TOL_HERM};
use crate::random::seeded_rng;

/// Seed used by [`Povm::validate`] to draw random disjoint event pairs.
pub const VALIDATION_SEED: u64 = 0x5eed_0f_90b3;
pub const VALIDATION_PAIRS: usize = 50;
/// Additivity residuals must stay below `ADDITIVITY_RTOL · (1 + ‖M(Ω)‖_F)`.
pub const ADDITIVITY_RTOL: f64 = 1e-12;
/// Tolerance on `‖x‖ − 1` for measurement states.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// A set function from events (sets of atom indices) to `n × n` matrices.
pub trait OperatorMeasure {
    fn atoms(&self) -> &[String];
    fn dim_h(&self) -> usize;
    /// Value on the event made of the given atom indices (distinct, in any order).
    fn measure_of(&self, members: &[usize]) -> ComplexMatrix;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    atoms: Vec<String>,
    dim_h: usize,
    elements: Vec<ComplexMatrix>,
}

/// A set of atom labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Event {
    members: BTreeSet<String>,
}

impl Event {
    pub fn new<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn members(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailureKind {
    NotHermitian,
    NotPsd,
    NotAdditive,
    NonNullEmptySet,
    EigenSolverFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationFailure {
    pub kind: FailureKind,
    /// Offending atom, when the failure is per element.
    pub atom: Option<String>,
    pub value: f64,
    pub tolerance: f64,
}

/// Outcome of checking the POVM axioms numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub atoms: Vec<String>,
    /// `‖M − M*‖_F / ‖M‖_F` per atom.
    pub hermiticity_residuals: Vec<f64>,
    /// Smallest eigenvalue of the Hermitian part of each element.
    pub min_eigenvalues: Vec<f64>,
    pub empty_set_residual: f64,
    /// Max over sampled disjoint pairs of `‖M(E) + M(F) − M(E∪F)‖_F`.
    pub additivity_residual: f64,
    pub additivity_tolerance: f64,
    pub pairs_checked: usize,
    pub failures: Vec<ValidationFailure>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn has_failure(&self, kind: FailureKind) -> bool {
        self.failures.iter().any(|f| f.kind == kind)
    }
}

/// `M(Ω)` invertibility check and its extreme eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Framedness {
    pub framed: bool,
    pub lower: f64,
    pub upper: f64,
}

impl Povm {
    /// Structural checks only (shapes, labels); positivity is the validator's job.
    pub fn new(atoms: Vec<String>, dim_h: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidPovm("no atoms".into()));
        }
        if atoms.len() != elements.len() {
            return Err(Error::InvalidPovm(format!(
                "{} atoms but {} elements",
                atoms.len(),
                elements.len()
            )));
        }
        check_unique_labels(&atoms).map_err(Error::InvalidPovm)?;
        if let Some((label, e)) = atoms
            .iter()
            .zip(&elements)
            .find(|(_, e)| e.shape() != (dim_h, dim_h))
        {
            return Err(Error::InvalidPovm(format!(
                "element `{label}` is {}x{}, expected {dim_h}x{dim_h}",
                e.rows(),
                e.cols()
            )));
        }
        Ok(Self {
            atoms,
            dim_h,
            elements,
        })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    pub fn event_indices(&self, event: &Event) -> Result<Vec<usize>> {
        event
            .members()
            .map(|m| self.index_of(m).ok_or_else(|| Error::UnknownAtom(m.to_string())))
            .collect()
    }

    /// `M(E) = Σ_{t ∈ E} M({t})`; the empty event gives the zero matrix.
    pub fn evaluate(&self, event: &Event) -> Result<ComplexMatrix> {
        let idx = self.event_indices(event)?;
        Ok(self.measure_of(&idx))
    }

    /// `M(Ω)`
    pub fn total(&self) -> ComplexMatrix {
        let all: Vec<usize> = (0..self.len()).collect();
        self.measure_of(&all)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_measure(self, VALIDATION_SEED)
    }

    /// `M` is framed when `M(Ω)` is invertible, i.e. `λ_min(M(Ω)) > 1e-10 λ_max`.
    pub fn is_framed(&self) -> Framedness {
        match hermitian_eigen(&self.total().hermitian_part()) {
            Ok(eig) => Framedness {
                framed: eig.min() > tol_frame(eig.max()),
                lower: eig.min(),
                upper: eig.max(),
            },
            Err(_) => Framedness {
                framed: false,
                lower: 0.0,
                upper: 0.0,
            },
        }
    }

    /// Outcome probabilities `Re <M({t})x, x>` for a unit state `x`.
    ///
    /// Tiny negatives (within `tol_psd`) are clamped to zero; larger ones are
    /// reported as `NotPsd`. The sum is `<M(Ω)x, x>`, which is 1 exactly when
    /// `M(Ω) = I`.
    pub fn measure_probabilities(&self, x: &ComplexVector) -> Result<Vec<f64>> {
        if x.dim() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: "state length",
                expected: self.dim_h,
                found: x.dim(),
            });
        }
        let norm = x.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitVector { norm });
        }
        self.elements
            .iter()
            .map(|m| {
                let p = m.mul_vec(x)?.inner(x).re;
                let tol = tol_psd(m.frobenius_norm());
                if p < -tol {
                    Err(Error::NotPsd {
                        eigenvalue: p,
                        tolerance: tol,
                    })
                } else {
                    Ok(p.max(0.0))
                }
            })
            .collect()
    }

    /// `M(Ω)^{-1/2} M({t}) M(Ω)^{-1/2}`: the same measurement rescaled so the
    /// total is the identity. Requires a framed POVM.
    pub fn normalized(&self) -> Result<Povm> {
        let total = self.total().hermitian_part();
        let fr = self.is_framed();
        if !fr.framed {
            return Err(Error::NotFramed {
                lower: fr.lower,
                tolerance: tol_frame(fr.upper),
            });
        }
        let root_inv = invert(&psd_sqrt(&total)?)?;
        let elements = self
            .elements
            .iter()
            .map(|m| (&(&root_inv * m) * &root_inv).hermitian_part())
            .collect();
        Povm::new(self.atoms.clone(), self.dim_h, elements)
    }
}

impl OperatorMeasure for Povm {
    fn atoms(&self) -> &[String] {
        &self.atoms
    }

    fn dim_h(&self) -> usize {
        self.dim_h
    }

    fn measure_of(&self, members: &[usize]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for &i in members {
            out.add_scaled(1.0, &self.elements[i]);
        }
        out
    }
}

/// Check the POVM axioms on any set function: Hermitian and PSD singletons,
/// `M(∅) = 0`, and additivity on `VALIDATION_PAIRS` random disjoint pairs
/// drawn from `seed`.
pub fn validate_measure<M: OperatorMeasure + ?Sized>(m: &M, seed: u64) -> ValidationReport {
    let atoms = m.atoms().to_vec();
    let n_atoms = atoms.len();
    let mut failures = Vec::new();
    let mut hermiticity_residuals = Vec::with_capacity(n_atoms);
    let mut min_eigenvalues = Vec::with_capacity(n_atoms);

    for (i, label) in atoms.iter().enumerate() {
        let elem = m.measure_of(&[i]);
        let herm = elem.hermiticity_residual();
        hermiticity_residuals.push(herm);
        if herm > TOL_HERM {
            failures.push(ValidationFailure {
                kind: FailureKind::NotHermitian,
                atom: Some(label.clone()),
                value: herm,
                tolerance: TOL_HERM,
            });
        }
        let tol = tol_psd(elem.frobenius_norm());
        match hermitian_eigen(&elem.hermitian_part()) {
            Ok(eig) => {
                min_eigenvalues.push(eig.min());
                if eig.min() < -tol {
                    failures.push(ValidationFailure {
                        kind: FailureKind::NotPsd,
                        atom: Some(label.clone()),
                        value: eig.min(),
                        tolerance: tol,
                    });
                }
            }
            Err(_) => {
                min_eigenvalues.push(0.0);
                failures.push(ValidationFailure {
                    kind: FailureKind::EigenSolverFailed,
                    atom: Some(label.clone()),
                    value: 0.0,
                    tolerance: 0.0,
                });
            }
        }
    }

    let all: Vec<usize> = (0..n_atoms).collect();
    let tol_add = ADDITIVITY_RTOL * (1.0 + m.measure_of(&all).frobenius_norm());

    let empty_set_residual = m.measure_of(&[]).frobenius_norm();
    if empty_set_residual > tol_add {
        failures.push(ValidationFailure {
            kind: FailureKind::NonNullEmptySet,
            atom: None,
            value: empty_set_residual,
            tolerance: tol_add,
        });
    }

    let mut rng = seeded_rng(seed);
    let mut additivity_residual: f64 = 0.0;
    for _ in 0..VALIDATION_PAIRS {
        let (mut e, mut f) = (Vec::new(), Vec::new());
        for i in 0..n_atoms {
            match rng.gen_range(0..3) {
                0 => e.push(i),
                1 => f.push(i),
                _ => {}
            }
        }
        let union: Vec<usize> = e.iter().chain(&f).copied().collect();
        let mut sum = m.measure_of(&e);
        sum.add_scaled(1.0, &m.measure_of(&f));
        let residual = (&sum - &m.measure_of(&union)).frobenius_norm();
        additivity_residual = additivity_residual.max(residual);
    }
    if additivity_residual > tol_add {
        failures.push(ValidationFailure {
            kind: FailureKind::NotAdditive,
            atom: None,
            value: additivity_residual,
            tolerance: tol_add,
        });
    }

    ValidationReport {
        seed,
        atoms,
        hermiticity_residuals,
        min_eigenvalues,
        empty_set_residual,
        additivity_residual,
        additivity_tolerance: tol_add,
        pairs_checked: VALIDATION_PAIRS,
        passed: failures.is_empty(),
        failures,
    }
}
