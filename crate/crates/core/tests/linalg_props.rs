mod common;

use framekit::linalg::{hermitian_eigen, invert, psd_sqrt, ComplexMatrix, ComplexVector};
use framekit::random::{self, seeded_rng};
use framekit::Error;
use proptest::prelude::*;

use common::rel_diff;

fn dims() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=12, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution((n, seed) in dims(), m in 1usize..6) {
        let a = random::matrix(&mut seeded_rng(seed), n, m);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn adjoint_reverses_products((n, seed) in dims(), k in 1usize..6, m in 1usize..6) {
        let mut rng = seeded_rng(seed);
        let a = random::matrix(&mut rng, n, k);
        let b = random::matrix(&mut rng, k, m);
        let lhs = a.try_mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().try_mul(&a.adjoint()).unwrap();
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-13);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric((n, seed) in dims()) {
        let mut rng = seeded_rng(seed);
        let x = random::vector(&mut rng, n);
        let y = random::vector(&mut rng, n);
        prop_assert!((x.inner(&y) - y.inner(&x).conj()).norm() <= 1e-14);
        let a = random::matrix(&mut rng, n, n);
        // <Ax, y> = <x, A*y>
        let lhs = a.mul_vec(&x).unwrap().inner(&y);
        let rhs = x.inner(&a.adjoint_mul_vec(&y).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn eigenpairs_satisfy_definition((n, seed) in dims()) {
        let a = random::hermitian(&mut seeded_rng(seed), n);
        let e = hermitian_eigen(&a).unwrap();
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let u = &e.eigenvectors;
        let gram = u.gram();
        prop_assert!((&gram - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-12);
        for (k, &l) in e.eigenvalues.iter().enumerate() {
            let v = u.column(k);
            let av = a.mul_vec(&v).unwrap();
            prop_assert!((&av - &v.scale_real(l)).norm() <= 1e-12 * (1.0 + a.frobenius_norm()));
        }
        prop_assert!(rel_diff(&e.reconstruct(), &a) <= 1e-12);
    }

    #[test]
    fn eigen_is_deterministic((n, seed) in dims()) {
        let a = random::hermitian(&mut seeded_rng(seed), n);
        prop_assert_eq!(hermitian_eigen(&a).unwrap(), hermitian_eigen(&a).unwrap());
    }

    #[test]
    fn psd_root_squares_back((n, seed) in dims(), rank_frac in 0.0f64..=1.0) {
        let rank = 1 + ((n - 1) as f64 * rank_frac) as usize;
        let p = random::psd(&mut seeded_rng(seed), n, rank);
        let r = psd_sqrt(&p).unwrap();
        prop_assert!(r.is_hermitian());
        prop_assert!(hermitian_eigen(&r).unwrap().min() >= -1e-10);
        prop_assert!(rel_diff(&r.try_mul(&r).unwrap(), &p) <= 1e-10);
    }

    #[test]
    fn inverse_of_positive_definite((n, seed) in dims()) {
        let mut rng = seeded_rng(seed);
        let mut p = random::psd(&mut rng, n, n);
        p.add_scaled(0.1, &ComplexMatrix::identity(n));
        let inv = invert(&p).unwrap();
        prop_assert!((&p.try_mul(&inv).unwrap() - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn inverse_of_general_matrix((n, seed) in dims()) {
        let mut a = random::matrix(&mut seeded_rng(seed), n, n);
        a.add_scaled(2.0 * n as f64, &ComplexMatrix::identity(n));
        let inv = invert(&a).unwrap();
        prop_assert!((&inv.try_mul(&a).unwrap() - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-12);
    }
}

#[test]
fn rank_deficient_inputs_are_singular() {
    let v = ComplexVector::from_real(&[1.0, 2.0, 3.0]);
    let p = ComplexMatrix::outer(&v, &v);
    assert!(matches!(invert(&p), Err(Error::Singular { .. })));
}

#[test]
fn large_dimension_reconstruction() {
    for dim in [32, 64] {
        let a = random::hermitian(&mut seeded_rng(dim as u64), dim);
        assert!(rel_diff(&hermitian_eigen(&a).unwrap().reconstruct(), &a) <= 1e-12);
    }
}
