//! The two-way correspondence between operator-valued frames and framed POVMs.
//!
//! Forward: an OVF gives rise to the POVM `M({t}) = μ({t}) T(t)* T(t)`.
//! Backward: a framed POVM is decomposed against a dominating reference
//! measure `μ` into densities `Q(t) = M({t}) / μ({t})`, and `T(t) = Q(t)^{1/2}`
//! recovers an OVF. Two decompositions `(μ₁, Q₁)`, `(μ₂, Q₂)` of the same POVM
//! agree in the sense `Q₁ w₁/(w₁+w₂) = Q₂ w₂/(w₁+w₂)` atomwise.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{tol_frame, AtomicMeasureSpace, OperatorValuedFrame};
use crate::linalg::{hermitian_eigen, psd_sqrt, tol_psd, ComplexMatrix, ComplexVector, TOL_HERM};
use crate::povm::{OperatorMeasure, Povm};
use crate::random::seeded_rng;

/// Relative tolerance for reintegration and uniqueness residuals:
/// `tol_decomp = DECOMP_RTOL · (1 + ‖M(Ω)‖_F)`.
pub const DECOMP_RTOL: f64 = 1e-10;
/// Exhaustive event enumeration up to this many atoms.
pub const EXHAUSTIVE_EVENT_LIMIT: usize = 16;
pub const SAMPLED_EVENTS: usize = 1000;
pub const EVENT_SAMPLING_SEED: u64 = 0xe7e27;
/// Atoms whose reference weight is at most this fraction of the largest
/// weight are treated as null and dropped.
pub const NULL_WEIGHT_RTOL: f64 = 1e-14;

pub fn tol_decomp(total_frobenius: f64) -> f64 {
    DECOMP_RTOL * (1.0 + total_frobenius)
}

/// How to pick the dominating reference measure.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceMeasureRule {
    /// `μ({t}) = tr M({t})`.
    Trace,
    /// `μ({t}) = Σ_j 2^{-j} <M({t}) x_j, x_j>` over a spanning sequence in the unit ball.
    DyadicSequence(Vec<ComplexVector>),
}

impl ReferenceMeasureRule {
    /// The dyadic rule over the standard basis `e_1, …, e_n`.
    pub fn dyadic_standard_basis(dim: usize) -> Self {
        Self::DyadicSequence((0..dim).map(|i| ComplexVector::basis(dim, i)).collect())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Trace => "trace",
            Self::DyadicSequence(_) => "dyadic",
        }
    }
}

/// Reference weights on every atom of the POVM, zeros included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMeasure {
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
}

impl ReferenceMeasure {
    fn null_threshold(&self) -> f64 {
        NULL_WEIGHT_RTOL * self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Indices of the atoms carrying mass.
    pub fn support(&self) -> Vec<usize> {
        let thr = self.null_threshold();
        (0..self.atoms.len()).filter(|&i| self.weights[i] > thr).collect()
    }
}

/// `(μ, Q)`: a measure on the retained atoms and one PSD density per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    measure: AtomicMeasureSpace,
    dim_h: usize,
    densities: Vec<ComplexMatrix>,
}

impl Decomposition {
    pub fn new(measure: AtomicMeasureSpace, dim_h: usize, densities: Vec<ComplexMatrix>) -> Result<Self> {
        if densities.len() != measure.len() {
            return Err(Error::DimensionMismatch {
                context: "one density per atom",
                expected: measure.len(),
                found: densities.len(),
            });
        }
        for (label, q) in measure.atoms().iter().zip(&densities) {
            if q.shape() != (dim_h, dim_h) {
                return Err(Error::DimensionMismatch {
                    context: "density must be dim_h x dim_h",
                    expected: dim_h,
                    found: if q.rows() != dim_h { q.rows() } else { q.cols() },
                });
            }
            let herm = q.hermiticity_residual();
            if herm > TOL_HERM {
                return Err(Error::InvalidPovm(format!(
                    "density `{label}` is not Hermitian (residual {herm:.3e})"
                )));
            }
            let min = hermitian_eigen(q)?.min();
            let tol = tol_psd(q.frobenius_norm());
            if min < -tol {
                return Err(Error::NotPsd {
                    eigenvalue: min,
                    tolerance: tol,
                });
            }
        }
        Ok(Self {
            measure,
            dim_h,
            densities,
        })
    }

    pub fn measure(&self) -> &AtomicMeasureSpace {
        &self.measure
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn densities(&self) -> &[ComplexMatrix] {
        &self.densities
    }

    /// `Σ_{t ∈ E} μ({t}) Q(t)`; labels outside the retained atoms contribute nothing.
    pub fn reintegrate<S: AsRef<str>>(&self, event: &[S]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for label in event {
            if let Some(i) = self.measure.index_of(label.as_ref()) {
                out.add_scaled(self.measure.weights()[i], &self.densities[i]);
            }
        }
        out
    }

    /// Reintegrated `M(Ω)`.
    pub fn total(&self) -> ComplexMatrix {
        weighted_sum(self.measure.weights(), &self.densities, self.dim_h)
    }

    /// The POVM on the retained atoms, `M({t}) = μ({t}) Q(t)`.
    pub fn to_povm(&self) -> Povm {
        let elements = self
            .densities
            .iter()
            .zip(self.measure.weights())
            .map(|(q, &w)| q.scale(w))
            .collect();
        Povm::new(self.measure.atoms().to_vec(), self.dim_h, elements)
            .expect("decomposition shapes are validated")
    }
}

fn weighted_sum(weights: &[f64], mats: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (m, &w) in mats.iter().zip(weights) {
        out.add_scaled(w, m);
    }
    out
}

/// The POVM an OVF gives rise to: `M({t}) = μ({t}) T(t)* T(t)`.
pub fn ovf_to_povm(ovf: &OperatorValuedFrame) -> Povm {
    let elements = ovf
        .blocks()
        .iter()
        .zip(ovf.space().weights())
        .map(|(b, &w)| b.gram().hermitian_part().scale(w))
        .collect();
    Povm::new(ovf.space().atoms().to_vec(), ovf.dim_h(), elements)
        .expect("OVF blocks have dim_h columns")
}

/// Dominating reference weights for every atom of `m`.
///
/// Both rules vanish on an atom only if its element vanishes: a PSD matrix
/// has zero trace only when it is zero, and a spanning sequence sees every
/// non-zero PSD matrix.
pub fn reference_measure(m: &Povm, rule: &ReferenceMeasureRule) -> Result<ReferenceMeasure> {
    let weights = match rule {
        ReferenceMeasureRule::Trace => m.elements().iter().map(|e| e.trace().re).collect(),
        ReferenceMeasureRule::DyadicSequence(seq) => {
            check_sequence(seq, m.dim_h())?;
            let images: Vec<Vec<f64>> = m
                .elements()
                .iter()
                .map(|e| {
                    seq.iter()
                        .map(|x| e.mul_vec(x).map(|ex| ex.inner(x).re))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            images
                .iter()
                .map(|quad| {
                    let mut w = 0.0;
                    let mut factor = 0.5;
                    for q in quad {
                        w += factor * q;
                        factor *= 0.5;
                    }
                    w
                })
                .collect()
        }
    };
    Ok(ReferenceMeasure {
        atoms: m.atoms().to_vec(),
        weights,
    })
}

fn check_sequence(seq: &[ComplexVector], dim: usize) -> Result<()> {
    for (i, x) in seq.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "reference sequence vector length",
                expected: dim,
                found: x.dim(),
            });
        }
        let norm = x.norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::SequenceOutsideUnitBall { index: i, norm });
        }
    }
    if seq.len() < dim {
        return Err(Error::SequenceDoesNotSpan {
            rank: seq.len(),
            dim,
        });
    }
    let mut gram = ComplexMatrix::zeros(dim, dim);
    for x in seq {
        gram.add_scaled(1.0, &ComplexMatrix::outer(x, x));
    }
    let eig = hermitian_eigen(&gram.hermitian_part())?;
    let thr = 1e-10 * eig.max();
    let rank = eig.eigenvalues.iter().filter(|&&l| l > thr).count();
    if eig.max() <= 0.0 || rank < dim {
        return Err(Error::SequenceDoesNotSpan { rank, dim });
    }
    Ok(())
}

/// Decompose a POVM as `M({t}) = μ({t}) Q(t)` over the chosen reference measure.
///
/// Null atoms (weight at most `1e-14` of the largest) are dropped; by
/// domination their elements vanish.
pub fn decompose(m: &Povm, rule: &ReferenceMeasureRule) -> Result<Decomposition> {
    let report = m.validate();
    if !report.passed {
        let kinds: Vec<String> = report.failures.iter().map(|f| format!("{:?}", f.kind)).collect();
        return Err(Error::InvalidPovm(format!("validation failed: {}", kinds.join(", "))));
    }
    let reference = reference_measure(m, rule)?;
    let support = reference.support();
    if support.is_empty() {
        return Err(Error::InvalidPovm("every element is zero".into()));
    }
    let atoms = support.iter().map(|&i| reference.atoms[i].clone()).collect();
    let weights: Vec<f64> = support.iter().map(|&i| reference.weights[i]).collect();
    let densities = support
        .iter()
        .zip(&weights)
        .map(|(&i, &w)| m.elements()[i].scale(1.0 / w).hermitian_part())
        .collect();
    Decomposition::new(AtomicMeasureSpace::new(atoms, weights)?, m.dim_h(), densities)
}

/// `T(t) = Q(t)^{1/2}` over the decomposition's measure.
pub fn decomposition_to_ovf(d: &Decomposition) -> Result<OperatorValuedFrame> {
    let total = d.total().hermitian_part();
    let eig = hermitian_eigen(&total)?;
    let tol = tol_frame(eig.max());
    if !(eig.min() > tol) {
        return Err(Error::NotFramed {
            lower: eig.min(),
            tolerance: tol,
        });
    }
    let blocks = d.densities.iter().map(psd_sqrt).collect::<Result<Vec<_>>>()?;
    OperatorValuedFrame::new(d.measure.clone(), d.dim_h, blocks)
}

/// Atomwise comparison of two `(μ, Q)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    /// Union of both label sets: first decomposition's order, then extras.
    pub atoms: Vec<String>,
    /// `‖Q₁ w₁/(w₁+w₂) − Q₂ w₂/(w₁+w₂)‖_F` per atom.
    pub per_atom_residuals: Vec<f64>,
    pub max_residual: f64,
    /// `(w₁/(w₁+w₂), w₂/(w₁+w₂))` per atom.
    pub radon_nikodym_ratios: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub passed: bool,
}

struct Side<'a> {
    space: &'a AtomicMeasureSpace,
    densities: &'a [ComplexMatrix],
    dim: usize,
}

fn compare(a: Side<'_>, b: Side<'_>) -> Result<UniquenessReport> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            context: "decompositions act on different spaces",
            expected: a.dim,
            found: b.dim,
        });
    }
    if !a.space.atoms().iter().any(|l| b.space.index_of(l).is_some()) {
        return Err(Error::AtomMismatch);
    }
    let mut atoms: Vec<String> = a.space.atoms().to_vec();
    atoms.extend(
        b.space
            .atoms()
            .iter()
            .filter(|l| a.space.index_of(l).is_none())
            .cloned(),
    );

    let zero = ComplexMatrix::zeros(a.dim, a.dim);
    let lookup = |side: &Side<'_>, label: &str| -> (f64, ComplexMatrix) {
        match side.space.index_of(label) {
            Some(i) => (side.space.weights()[i], side.densities[i].clone()),
            None => (0.0, zero.clone()),
        }
    };

    let mut residuals = Vec::with_capacity(atoms.len());
    let mut ratios = Vec::with_capacity(atoms.len());
    for label in &atoms {
        let (w1, q1) = lookup(&a, label);
        let (w2, q2) = lookup(&b, label);
        let sum = w1 + w2;
        let (r1, r2) = (w1 / sum, w2 / sum);
        let mut diff = q1.scale(r1);
        diff.add_scaled(-r2, &q2);
        residuals.push(diff.frobenius_norm());
        ratios.push((r1, r2));
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let total_a = weighted_sum(a.space.weights(), a.densities, a.dim).frobenius_norm();
    let total_b = weighted_sum(b.space.weights(), b.densities, b.dim).frobenius_norm();
    let tolerance = tol_decomp(total_a.max(total_b));
    Ok(UniquenessReport {
        atoms,
        per_atom_residuals: residuals,
        max_residual,
        radon_nikodym_ratios: ratios,
        tolerance,
        passed: max_residual <= tolerance,
    })
}

/// Check `Q₁ dμ₁/d(μ₁+μ₂) = Q₂ dμ₂/d(μ₁+μ₂)` atomwise, matching atoms by label.
pub fn verify_uniqueness(d1: &Decomposition, d2: &Decomposition) -> Result<UniquenessReport> {
    compare(
        Side {
            space: &d1.measure,
            densities: &d1.densities,
            dim: d1.dim_h,
        },
        Side {
            space: &d2.measure,
            densities: &d2.densities,
            dim: d2.dim_h,
        },
    )
}

/// The same comparison with `Q_i(t) = T_i(t)* T_i(t)`.
pub fn verify_ovf_equivalence(f1: &OperatorValuedFrame, f2: &OperatorValuedFrame) -> Result<UniquenessReport> {
    let q1 = f1.gram_blocks();
    let q2 = f2.gram_blocks();
    compare(
        Side {
            space: f1.space(),
            densities: &q1,
            dim: f1.dim_h(),
        },
        Side {
            space: f2.space(),
            densities: &q2,
            dim: f2.dim_h(),
        },
    )
}

/// How well a decomposition reproduces `M(E)` over many events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReintegrationReport {
    pub events_checked: usize,
    pub exhaustive: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `max_E ‖M(E) − Σ_{t∈E} μ({t}) Q(t)‖_F`: every event when the POVM has at
/// most 16 atoms, otherwise 1000 seeded random events.
pub fn verify_reintegration(m: &Povm, d: &Decomposition) -> Result<ReintegrationReport> {
    if m.dim_h() != d.dim_h {
        return Err(Error::DimensionMismatch {
            context: "decomposition and POVM dimensions",
            expected: m.dim_h(),
            found: d.dim_h,
        });
    }
    let n = m.len();
    // per POVM atom: its weighted density, if retained
    let reintegrated: Vec<Option<ComplexMatrix>> = m
        .atoms()
        .iter()
        .map(|label| {
            d.measure
                .index_of(label)
                .map(|i| d.densities[i].scale(d.measure.weights()[i]))
        })
        .collect();
    let dim = m.dim_h();

    let residual_of = |members: &[usize]| -> f64 {
        let mut diff = m.measure_of(members);
        for &i in members {
            if let Some(r) = &reintegrated[i] {
                diff.add_scaled(-1.0, r);
            }
        }
        debug_assert_eq!(diff.rows(), dim);
        diff.frobenius_norm()
    };

    let exhaustive = n <= EXHAUSTIVE_EVENT_LIMIT;
    let mut max_residual: f64 = 0.0;
    let mut events_checked = 0;
    let mut members = Vec::with_capacity(n);
    if exhaustive {
        for mask in 0u64..(1u64 << n) {
            members.clear();
            members.extend((0..n).filter(|&i| mask >> i & 1 == 1));
            max_residual = max_residual.max(residual_of(&members));
            events_checked += 1;
        }
    } else {
        let mut rng = seeded_rng(EVENT_SAMPLING_SEED);
        for _ in 0..SAMPLED_EVENTS {
            members.clear();
            members.extend((0..n).filter(|_| rng.gen_bool(0.5)));
            max_residual = max_residual.max(residual_of(&members));
            events_checked += 1;
        }
    }
    let tolerance = tol_decomp(m.total().frobenius_norm());
    Ok(ReintegrationReport {
        events_checked,
        exhaustive,
        max_residual,
        tolerance,
        passed: max_residual <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::VectorFrame;

    fn e1_e1_e2() -> OperatorValuedFrame {
        let vs = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .map(|v| ComplexVector::from_real(v))
            .collect();
        OperatorValuedFrame::from_vector_frame(&VectorFrame::new(2, vs).unwrap()).unwrap()
    }

    fn projective_qubit() -> Povm {
        Povm::new(
            vec!["1".into(), "2".into()],
            2,
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    #[test]
    fn onb_gives_projective_povm() {
        let onb = OperatorValuedFrame::from_vector_frame(
            &VectorFrame::new(2, vec![ComplexVector::basis(2, 0), ComplexVector::basis(2, 1)]).unwrap(),
        )
        .unwrap();
        let m = ovf_to_povm(&onb);
        assert_eq!(m, projective_qubit());
        assert_eq!(m.total(), ComplexMatrix::identity(2));
    }

    #[test]
    fn redundant_frame_povm() {
        let m = ovf_to_povm(&e1_e1_e2());
        let d10 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(m.elements(), &[d10.clone(), d10, ComplexMatrix::from_real_diagonal(&[0.0, 1.0])]);
        assert_eq!(m.total(), ComplexMatrix::from_real_diagonal(&[2.0, 1.0]));
        let fr = m.is_framed();
        assert!(fr.framed && fr.lower == 1.0 && fr.upper == 2.0);
    }

    #[test]
    fn reference_measure_examples() {
        let r = reference_measure(&projective_qubit(), &ReferenceMeasureRule::Trace).unwrap();
        assert_eq!(r.weights, vec![1.0, 1.0]);
        let single = Povm::new(vec!["1".into()], 2, vec![ComplexMatrix::from_real_diagonal(&[2.0, 1.0])]).unwrap();
        assert_eq!(reference_measure(&single, &ReferenceMeasureRule::Trace).unwrap().weights, vec![3.0]);
        let r = reference_measure(&projective_qubit(), &ReferenceMeasureRule::dyadic_standard_basis(2)).unwrap();
        assert_eq!(r.weights, vec![0.5, 0.25]);
    }

    #[test]
    fn sequence_checks() {
        let m = projective_qubit();
        let short = ReferenceMeasureRule::DyadicSequence(vec![ComplexVector::basis(2, 0)]);
        assert!(matches!(reference_measure(&m, &short), Err(Error::SequenceDoesNotSpan { .. })));
        let parallel = ReferenceMeasureRule::DyadicSequence(vec![
            ComplexVector::basis(2, 0),
            ComplexVector::basis(2, 0).scale_real(0.5),
        ]);
        assert!(matches!(
            reference_measure(&m, &parallel),
            Err(Error::SequenceDoesNotSpan { rank: 1, dim: 2 })
        ));
        let big = ReferenceMeasureRule::DyadicSequence(vec![
            ComplexVector::from_real(&[2.0, 0.0]),
            ComplexVector::basis(2, 1),
        ]);
        assert!(matches!(
            reference_measure(&m, &big),
            Err(Error::SequenceOutsideUnitBall { index: 0, .. })
        ));
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&projective_qubit(), &ReferenceMeasureRule::Trace).unwrap();
        assert_eq!(d.measure().weights(), &[1.0, 1.0]);
        assert_eq!(d.densities(), projective_qubit().elements());

        let m = ovf_to_povm(&e1_e1_e2());
        let d = decompose(&m, &ReferenceMeasureRule::Trace).unwrap();
        assert_eq!(d.measure().weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(d.densities(), m.elements());

        let d = decompose(&m, &ReferenceMeasureRule::dyadic_standard_basis(2)).unwrap();
        assert_eq!(d.measure().weights(), &[0.5, 0.5, 0.25]);
        assert_eq!(d.densities()[0], ComplexMatrix::from_real_diagonal(&[2.0, 0.0]));
        assert_eq!(d.densities()[2], ComplexMatrix::from_real_diagonal(&[0.0, 4.0]));
        assert!(verify_reintegration(&m, &d).unwrap().passed);
    }

    #[test]
    fn null_atoms_are_dropped() {
        let m = Povm::new(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::zeros(2, 2),
                ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        let d = decompose(&m, &ReferenceMeasureRule::Trace).unwrap();
        assert_eq!(d.measure().atoms(), &["a".to_string(), "c".to_string()]);
        let r = verify_reintegration(&m, &d).unwrap();
        assert!(r.passed && r.exhaustive && r.events_checked == 8);
    }

    #[test]
    fn decompose_rejects_invalid_povm() {
        let m = Povm::new(vec!["1".into()], 2, vec![ComplexMatrix::from_real_diagonal(&[1.0, -1e-3])]).unwrap();
        assert!(matches!(decompose(&m, &ReferenceMeasureRule::Trace), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn decomposition_to_ovf_examples() {
        let d = decompose(&projective_qubit(), &ReferenceMeasureRule::Trace).unwrap();
        let f = decomposition_to_ovf(&d).unwrap();
        for (t, q) in f.blocks().iter().zip(d.densities()) {
            assert!(close(t, q, 1e-12));
        }

        let m = ovf_to_povm(&e1_e1_e2());
        let d = decompose(&m, &ReferenceMeasureRule::dyadic_standard_basis(2)).unwrap();
        let f = decomposition_to_ovf(&d).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[2f64.sqrt(), 0.0]);
        assert!(close(&f.blocks()[0], &expected, 1e-15));
        let back = ovf_to_povm(&f);
        for (a, b) in back.elements().iter().zip(m.elements()) {
            assert!(close(a, b, 1e-10));
        }
        assert!(close(f.frame_operator(), &d.total(), 1e-10));
    }

    #[test]
    fn not_framed_decomposition() {
        let m = Povm::new(
            vec!["1".into(), "2".into()],
            2,
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            ],
        )
        .unwrap();
        let d = decompose(&m, &ReferenceMeasureRule::Trace).unwrap();
        assert!(matches!(decomposition_to_ovf(&d), Err(Error::NotFramed { .. })));
    }

    #[test]
    fn scaled_pair_has_zero_residual() {
        let d1 = decompose(&ovf_to_povm(&e1_e1_e2()), &ReferenceMeasureRule::Trace).unwrap();
        let d2 = Decomposition::new(
            d1.measure().scaled(2.0).unwrap(),
            2,
            d1.densities().iter().map(|q| q.scale(0.5)).collect(),
        )
        .unwrap();
        let r = verify_uniqueness(&d1, &d2).unwrap();
        assert_eq!(r.max_residual, 0.0);
        for &(a, b) in &r.radon_nikodym_ratios {
            assert!((a - 1.0 / 3.0).abs() < 1e-16 && (b - 2.0 / 3.0).abs() < 1e-16);
        }
        assert!(r.passed);
    }

    #[test]
    fn perturbed_density_is_detected() {
        let m = ovf_to_povm(&e1_e1_e2());
        let d1 = decompose(&m, &ReferenceMeasureRule::Trace).unwrap();
        let mut qs = d1.densities().to_vec();
        qs[2][(1, 1)] += 0.01;
        let d2 = Decomposition::new(d1.measure().clone(), 2, qs).unwrap();
        let r = verify_uniqueness(&d1, &d2).unwrap();
        // weights equal: residual = 0.01 · 1/2
        assert!((r.per_atom_residuals[2] - 0.005).abs() < 1e-15);
        assert_eq!(r.per_atom_residuals[0], 0.0);
        assert!(!r.passed);
    }

    #[test]
    fn uniqueness_errors() {
        let d1 = decompose(&projective_qubit(), &ReferenceMeasureRule::Trace).unwrap();
        let other = Povm::new(vec!["x".into()], 2, vec![ComplexMatrix::identity(2)]).unwrap();
        let d2 = decompose(&other, &ReferenceMeasureRule::Trace).unwrap();
        assert_eq!(verify_uniqueness(&d1, &d2), Err(Error::AtomMismatch));
        let d3 = decompose(
            &Povm::new(vec!["1".into()], 3, vec![ComplexMatrix::identity(3)]).unwrap(),
            &ReferenceMeasureRule::Trace,
        )
        .unwrap();
        assert!(matches!(verify_uniqueness(&d1, &d3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ovf_equivalence_is_root_invariant() {
        let f1 = e1_e1_e2();
        assert_eq!(verify_ovf_equivalence(&f1, &f1).unwrap().max_residual, 0.0);
        // U = diag(1, i) applied to square roots
        let d = decompose(&ovf_to_povm(&f1), &ReferenceMeasureRule::Trace).unwrap();
        let f2 = decomposition_to_ovf(&d).unwrap();
        let u = ComplexMatrix::from_rows(&[
            vec![num_complex::Complex64::new(0.0, 1.0), num_complex::Complex64::new(0.0, 0.0)],
            vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, 1.0)],
        ]);
        let twisted: Vec<ComplexMatrix> = f2.blocks().iter().map(|t| &u * t).collect();
        let f3 = OperatorValuedFrame::new(f2.space().clone(), 2, twisted).unwrap();
        assert!(verify_ovf_equivalence(&f2, &f3).unwrap().max_residual < 1e-15);
        assert!(verify_ovf_equivalence(&f1, &f2).unwrap().max_residual <= 1e-10);
    }
}
