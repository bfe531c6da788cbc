//! Frames, g-frames, quadrature-discretised continuous frames and the
//! operator-valued frames (OVFs) that subsume all three.
//!
//! Everything lives over a finite atomic measure space: a list of labelled
//! atoms with strictly positive weights, where every subset is an event.
//! Integrals over the space become weighted sums in atom order.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector};

/// Relative threshold below which `λ_min(S)` means "not a frame".
pub const FRAME_RTOL: f64 = 1e-10;

pub fn tol_frame(lambda_max: f64) -> f64 {
    FRAME_RTOL * lambda_max
}

/// Finite measure space: labelled atoms, each with a positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasureSpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

impl AtomicMeasureSpace {
    pub fn new(atoms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasureSpace("no atoms".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasureSpace(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        check_unique_labels(&atoms).map_err(Error::InvalidMeasureSpace)?;
        if let Some((label, w)) = atoms
            .iter()
            .zip(&weights)
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidMeasureSpace(format!(
                "atom `{label}` has non-positive or non-finite weight {w}"
            )));
        }
        Ok(Self { atoms, weights })
    }

    /// Atoms labelled `"1"`, …, `"n"`, all of weight `weight`.
    pub fn counting(n: usize, weight: f64) -> Result<Self> {
        Self::new(default_labels(n), vec![weight; n])
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
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

    /// `μ(E)` for an event given by atom labels.
    pub fn measure<S: AsRef<str>>(&self, event: &[S]) -> Result<f64> {
        event
            .iter()
            .map(|label| {
                let label = label.as_ref();
                self.index_of(label)
                    .map(|i| self.weights[i])
                    .ok_or_else(|| Error::UnknownAtom(label.to_string()))
            })
            .sum()
    }

    /// The same atoms with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.atoms.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub(crate) fn check_unique_labels(atoms: &[String]) -> std::result::Result<(), String> {
    let mut seen = HashSet::with_capacity(atoms.len());
    for a in atoms {
        if !seen.insert(a.as_str()) {
            return Err(format!("duplicate atom label `{a}`"));
        }
    }
    Ok(())
}

/// Optimal frame bounds: the extreme eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper && upper.is_finite()) {
            return Err(Error::InvalidBounds { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// Contraction factor `(B − A) / (B + A)` of the frame algorithm.
    pub fn convergence_ratio(&self) -> f64 {
        (self.upper - self.lower) / (self.upper + self.lower)
    }

    /// Relaxation constant `2 / (A + B)`.
    pub fn relaxation(&self) -> f64 {
        2.0 / (self.lower + self.upper)
    }
}

/// A classical frame `{x_i}` for `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFrame {
    dim_h: usize,
    vectors: Vec<ComplexVector>,
}

impl VectorFrame {
    pub fn new(dim_h: usize, vectors: Vec<ComplexVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim_h) {
            return Err(Error::DimensionMismatch {
                context: "frame vector length",
                expected: dim_h,
                found: v.dim(),
            });
        }
        Ok(Self { dim_h, vectors })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }
}

/// One coefficient segment `T(t)x ∈ C^{k_t}` per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    space: AtomicMeasureSpace,
    segments: Vec<ComplexVector>,
}

impl CoefficientField {
    pub fn new(space: AtomicMeasureSpace, segments: Vec<ComplexVector>) -> Result<Self> {
        if segments.len() != space.len() {
            return Err(Error::DimensionMismatch {
                context: "one coefficient segment per atom",
                expected: space.len(),
                found: segments.len(),
            });
        }
        Ok(Self { space, segments })
    }

    pub fn space(&self) -> &AtomicMeasureSpace {
        &self.space
    }

    pub fn segments(&self) -> &[ComplexVector] {
        &self.segments
    }

    /// `Σ_t μ({t}) ‖c_t‖²`
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.space
            .weights()
            .iter()
            .zip(&self.segments)
            .map(|(w, s)| w * s.norm_sqr())
            .sum()
    }
}

/// `(μ, {T(t)})`: one block `T(t): C^n → C^{k_t}` per atom, with the frame
/// operator `S = Σ_t μ({t}) T(t)* T(t)` positive definite.
///
/// `S` and its bounds are computed once at construction; the value is
/// immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValuedFrame {
    space: AtomicMeasureSpace,
    dim_h: usize,
    blocks: Vec<ComplexMatrix>,
    frame_operator: ComplexMatrix,
    bounds: FrameBounds,
}

impl OperatorValuedFrame {
    pub fn new(space: AtomicMeasureSpace, dim_h: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::DimensionMismatch {
                context: "one block per atom",
                expected: space.len(),
                found: blocks.len(),
            });
        }
        if let Some(b) = blocks.iter().find(|b| b.cols() != dim_h) {
            return Err(Error::DimensionMismatch {
                context: "block column count must equal dim_h",
                expected: dim_h,
                found: b.cols(),
            });
        }
        let frame_operator = weighted_gram_sum(space.weights(), &blocks, dim_h);
        let bounds = frame_bounds_of(&frame_operator)?;
        Ok(Self {
            space,
            dim_h,
            blocks,
            frame_operator,
            bounds,
        })
    }

    /// `T_i = <·, x_i>`: block `i` is the row of conjugated entries of `x_i`,
    /// on atoms `"1"…"N"` with unit weights.
    pub fn from_vector_frame(frame: &VectorFrame) -> Result<Self> {
        let space = AtomicMeasureSpace::counting(frame.vectors.len(), 1.0)?;
        let blocks = frame.vectors.iter().map(ComplexMatrix::bra).collect();
        Self::new(space, frame.dim_h, blocks)
    }

    /// A continuous frame sampled on a user-supplied quadrature grid.
    pub fn discretize_continuous(samples: &[ComplexVector], weights: &[f64]) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyFrame)?;
        if weights.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                context: "one quadrature weight per sample",
                expected: samples.len(),
                found: weights.len(),
            });
        }
        let dim_h = first.dim();
        if let Some(s) = samples.iter().find(|s| s.dim() != dim_h) {
            return Err(Error::DimensionMismatch {
                context: "sample length",
                expected: dim_h,
                found: s.dim(),
            });
        }
        let space = AtomicMeasureSpace::new(default_labels(samples.len()), weights.to_vec())?;
        Self::new(space, dim_h, samples.iter().map(ComplexMatrix::bra).collect())
    }

    pub fn space(&self) -> &AtomicMeasureSpace {
        &self.space
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// `S = Σ_t μ({t}) T(t)* T(t)`
    pub fn frame_operator(&self) -> &ComplexMatrix {
        &self.frame_operator
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        self.bounds
    }

    /// Analysis operator: `x ↦ {T(t)x}_t`.
    pub fn analysis(&self, x: &ComplexVector) -> Result<CoefficientField> {
        if x.dim() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: "analysis input",
                expected: self.dim_h,
                found: x.dim(),
            });
        }
        let segments = self
            .blocks
            .iter()
            .map(|b| b.mul_vec(x))
            .collect::<Result<Vec<_>>>()?;
        CoefficientField::new(self.space.clone(), segments)
    }

    /// Synthesis operator: `c ↦ Σ_t μ({t}) T(t)* c_t`.
    pub fn synthesis(&self, c: &CoefficientField) -> Result<ComplexVector> {
        if c.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = ComplexVector::zeros(self.dim_h);
        for ((block, seg), &w) in self.blocks.iter().zip(&c.segments).zip(self.space.weights()) {
            if seg.dim() != block.rows() {
                return Err(Error::DimensionMismatch {
                    context: "coefficient segment length",
                    expected: block.rows(),
                    found: seg.dim(),
                });
            }
            let contrib = block.adjoint_mul_vec(seg)?;
            out.axpy(w.into(), &contrib);
        }
        Ok(out)
    }

    /// Per-atom `T(t)* T(t)`.
    pub fn gram_blocks(&self) -> Vec<ComplexMatrix> {
        self.blocks.iter().map(|b| b.gram().hermitian_part()).collect()
    }
}

/// `Σ_t w_t T_t* T_t`, symmetrised.
pub(crate) fn weighted_gram_sum(weights: &[f64], blocks: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(dim, dim);
    for (b, &w) in blocks.iter().zip(weights) {
        s.add_scaled(w, &b.gram());
    }
    s.hermitian_part()
}

/// Frame bounds of a frame operator; `NotAFrame` when `λ_min ≤ 1e-10 λ_max`.
pub fn frame_bounds_of(frame_operator: &ComplexMatrix) -> Result<FrameBounds> {
    let eig = hermitian_eigen(frame_operator)?;
    let (lower, upper) = (eig.min(), eig.max());
    let tol = tol_frame(upper);
    if !(lower > tol) {
        return Err(Error::NotAFrame {
            lower,
            tolerance: tol,
        });
    }
    Ok(FrameBounds { lower, upper })
}
