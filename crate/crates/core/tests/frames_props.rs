mod common;

use framekit::frames::{OperatorValuedFrame, VectorFrame};
use framekit::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector};
use framekit::random::{self, generate_frame, seeded_rng};
use framekit::reconstruction::{frame_algorithm, reconstruct_direct, ReconstructionConfig, StopReason};
use proptest::prelude::*;

use common::*;

fn frame_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=8, 0usize..=6, any::<u64>()).prop_map(|(d, extra, s)| (d, d + extra, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_inequality_holds((dim, atoms, seed) in frame_params()) {
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, atoms, seed).unwrap()).unwrap();
        let b = ovf.frame_bounds();
        prop_assert!(b.lower > 0.0 && b.lower <= b.upper);
        let mut rng = seeded_rng(seed ^ 1);
        for _ in 0..5 {
            let x = random::vector(&mut rng, dim);
            let energy = ovf.analysis(&x).unwrap().weighted_norm_sqr();
            let nx = x.norm_sqr();
            prop_assert!(b.lower * nx <= energy * (1.0 + 1e-10) + 1e-14);
            prop_assert!(energy <= b.upper * nx * (1.0 + 1e-10) + 1e-14);
        }
    }

    #[test]
    fn synthesis_is_adjoint_of_analysis((dim, atoms, seed) in frame_params()) {
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, atoms, seed).unwrap()).unwrap();
        let mut rng = seeded_rng(seed ^ 2);
        let x = random::vector(&mut rng, dim);
        let y = random::vector(&mut rng, dim);
        // <Tx, Ty> = <T*T x, y> = <Sx, y>
        let tx = ovf.analysis(&x).unwrap();
        let sx = ovf.synthesis(&tx).unwrap();
        prop_assert!((&sx - &ovf.frame_operator().mul_vec(&x).unwrap()).norm() <= 1e-12 * (1.0 + sx.norm()));
        let ty = ovf.analysis(&y).unwrap();
        let lhs: framekit::linalg::ComplexScalar = tx
            .segments()
            .iter()
            .zip(ty.segments())
            .zip(ovf.space().weights())
            .map(|((a, b), w)| a.inner(b) * w)
            .sum();
        prop_assert!((lhs - sx.inner(&y)).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn frame_operator_is_hermitian_positive((dim, atoms, seed) in frame_params()) {
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, atoms, seed).unwrap()).unwrap();
        let s = ovf.frame_operator();
        prop_assert!(s.is_hermitian());
        let e = hermitian_eigen(s).unwrap();
        prop_assert!((e.min() - ovf.frame_bounds().lower).abs() <= 1e-12 * e.max());
    }

    #[test]
    fn direct_reconstruction_recovers_signal((dim, atoms, seed) in frame_params()) {
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, atoms, seed).unwrap()).unwrap();
        let x = random::vector(&mut seeded_rng(seed ^ 3), dim);
        let c = ovf.analysis(&x).unwrap();
        let b = ovf.frame_bounds();
        let r = reconstruct_direct(&ovf, &c).unwrap();
        prop_assert!((&r - &x).norm() <= 1e-9 * (b.upper / b.lower) * (1.0 + x.norm()));
    }

    #[test]
    fn certified_bound_dominates_actual_error((dim, atoms, seed) in frame_params()) {
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, atoms, seed).unwrap()).unwrap();
        let x = random::vector(&mut seeded_rng(seed ^ 4), dim);
        let c = ovf.analysis(&x).unwrap();
        let cfg = ReconstructionConfig { max_iters: 200, target_error: 1e-8, bounds_override: None };
        let mut trace = frame_algorithm(&ovf, &c, &cfg).unwrap();
        trace.attach_truth(&x).unwrap();
        let actual = trace.actual_errors.clone().unwrap();
        for n in 0..actual.len() {
            prop_assert!(actual[n] <= trace.certified_bounds[n] + 1e-12);
            prop_assert!(actual[n] <= trace.posterior_bounds[n] + 1e-12);
        }
        prop_assert!(trace.certified_bounds.windows(2).all(|w| w[1] <= w[0]));
        if trace.stop_reason == StopReason::TargetReached {
            prop_assert!(actual.last().unwrap() <= &(1e-8 + 1e-12));
        }
    }
}

#[test]
fn rate_law_on_random_frames() {
    // error_n <= ratio^n ‖x‖ across dimensions 2..=16
    for seed in 0..24u64 {
        let dim = 2 + (seed as usize % 15);
        let ovf = OperatorValuedFrame::from_vector_frame(&generate_frame(dim, dim + 4, seed).unwrap()).unwrap();
        let x = random::vector(&mut seeded_rng(seed + 99), dim);
        let c = ovf.analysis(&x).unwrap();
        let cfg = ReconstructionConfig {
            max_iters: 60,
            target_error: f64::MIN_POSITIVE,
            bounds_override: None,
        };
        let mut trace = frame_algorithm(&ovf, &c, &cfg).unwrap();
        trace.attach_truth(&x).unwrap();
        let ratio = trace.convergence_ratio();
        for (n, e) in trace.actual_errors.unwrap().iter().enumerate() {
            assert!(*e <= ratio.powi(n as i32) * x.norm() + 1e-12, "seed {seed} n {n}");
        }
    }
}

#[test]
fn textbook_frames() {
    let onb = real_frame(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
    assert_eq!(onb.frame_operator(), &ComplexMatrix::identity(2));
    let b = onb.frame_bounds();
    assert_eq!((b.lower, b.upper), (1.0, 1.0));

    let s = e1_e1_e2().frame_operator().clone();
    assert_eq!(s, ComplexMatrix::from_real_diagonal(&[2.0, 1.0]));
    assert!((e1_e1_e2().frame_bounds().convergence_ratio() - 1.0 / 3.0).abs() < 1e-15);

    let tri = equiangular_triple();
    assert!((tri.frame_operator() - &ComplexMatrix::identity(2).scale(1.5)).frobenius_norm() < 1e-15);

    let f = fourier_frame(8);
    assert!((f.frame_operator() - &ComplexMatrix::identity(8)).frobenius_norm() < 1e-13);
}

#[test]
fn non_spanning_family_is_rejected() {
    let vs = vec![ComplexVector::from_real(&[1.0, 0.0]), ComplexVector::from_real(&[2.0, 0.0])];
    let err = OperatorValuedFrame::from_vector_frame(&VectorFrame::new(2, vs).unwrap()).unwrap_err();
    assert_eq!(err.name(), "NotAFrame");
}
