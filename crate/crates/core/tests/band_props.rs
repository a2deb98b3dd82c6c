mod common;

use proptest::prelude::*;
use shiftlab_core::band::{
    apply_banded, check_two_band_structure, conjugate_to_shift, verify_intertwining, verify_unitary,
    verify_unitary_three_band, verify_unitary_two_band, BandedOperator, Conjugation,
};
use shiftlab_core::linalg::{hermitian_eigen, is_partial_isometry};
use shiftlab_core::shift::apply_shift;
use shiftlab_core::{BilateralShift, ComplexMatrix, Tolerance, WeightSequence};

fn diagonal_shift_in_basis(rng: &mut rand_chacha::ChaCha8Rng, r: &ComplexMatrix, lo: i64, hi: i64) -> BilateralShift {
    let d = r.rows();
    let w = (lo..=hi)
        .map(|_| {
            let vals: Vec<_> = (0..d).map(|_| common::invertible(rng, 1).get(0, 0)).collect();
            &(r * &ComplexMatrix::diagonal(&vals)) * &r.adjoint()
        })
        .collect();
    BilateralShift::new(WeightSequence::windowed(lo, w).unwrap(), "S").unwrap()
}

fn assignment_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1i64..=1, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intertwining_agrees_with_application(seed in any::<u64>(), equal in any::<bool>()) {
        let mut rng = common::rng(seed);
        let d = 2;
        let s = common::ei_shift(&mut rng, d, -1, 3);
        // A diagonal with D_n = I intertwines S with itself; a random D does not.
        let a = if equal {
            BandedOperator::identity(d)
        } else {
            let dw = (-6..=6).map(|_| common::invertible(&mut rng, d)).collect();
            BandedOperator::single_band(0, WeightSequence::eventually_identity(-6, dw).unwrap())
        };
        let report = verify_intertwining(&a, &s, &s, -4, 4, &Tolerance::default()).unwrap();
        let mut agree = true;
        for c in -3..=3 {
            let x = common::windowed_vector(&mut rng, c, c, d);
            let lhs = apply_banded(&a, &apply_shift(&s, &x).unwrap()).unwrap();
            let rhs = apply_shift(&s, &apply_banded(&a, &x).unwrap()).unwrap();
            agree &= lhs.distance(&rhs) <= 1e-9 * lhs.norm().max(1.0);
        }
        prop_assert_eq!(report.passed, agree);
        prop_assert_eq!(report.passed, equal);
    }

    #[test]
    fn two_band_unitary_has_partial_isometry_bands(seed in any::<u64>(), r in 0usize..=3, k in 1i64..4) {
        let u = common::two_band_unitary(&mut common::rng(seed), 3, r, k, -5, 5);
        let tol = Tolerance::new(1e-9, 1e-12);
        let unitary = verify_unitary_two_band(&u, -5, 5, &tol).unwrap();
        prop_assert!(unitary.passed, "{:?}", unitary.first_failure());
        prop_assert!(check_two_band_structure(&u, -5, 5, &tol).unwrap().passed);
    }

    #[test]
    fn three_band_shift_conjugation_leaves_a_band_empty(seed in any::<u64>(), assignment in assignment_strategy()) {
        let mut rng = common::rng(seed);
        let r = common::unitary(&mut rng, 2);
        let (lo, hi) = (-6, 6);
        let u = common::coordinate_band_unitary(&mut rng, &assignment, &[-1, 0, 1], &r, lo, hi);
        let s = diagonal_shift_in_basis(&mut rng, &r, lo - 2, hi + 2);
        let tol = Tolerance::new(1e-9, 1e-12);

        // Premises: unitary three-band operator, USU* a shift, and
        // 1 ∈ spec(C_n C_n*) for consecutive rows.
        prop_assert!(verify_unitary_three_band(&u, lo, hi - 2, &tol).unwrap().passed);
        let conj = conjugate_to_shift(&u, &s, lo + 3, hi - 1, &tol).unwrap();
        prop_assert!(matches!(conj, Conjugation::Shift(_)));
        let c = u.band(1).unwrap();
        let has_one = |n: i64| {
            let cn = c.weight_at(n).unwrap();
            hermitian_eigen(&(&*cn * &cn.adjoint())).unwrap().0.iter().any(|v| (v - 1.0).abs() < tol.rel * 100.0)
        };
        prop_assume!((lo..hi).all(|n| has_one(n) && has_one(n + 1)));

        let zero_band = u.bands().values().any(|seq| seq.stored().iter().all(|w| w.frobenius_norm() <= tol.abs));
        prop_assert!(zero_band);
    }

    #[test]
    fn rank_one_middle_band_forces_partial_isometries(seed in any::<u64>(), assignment in assignment_strategy()) {
        prop_assume!(assignment.iter().filter(|&&k| k == 0).count() <= 1);
        let mut rng = common::rng(seed);
        let r = common::unitary(&mut rng, 2);
        let u = common::coordinate_band_unitary(&mut rng, &assignment, &[-1, 0, 1], &r, -4, 4);
        let tol = Tolerance::new(1e-9, 1e-12);
        prop_assert!(verify_unitary_three_band(&u, -4, 2, &tol).unwrap().passed);
        for n in -4..=4 {
            let b = u.band(0).unwrap().weight_at(n).unwrap();
            prop_assert!(b.singular_values().iter().filter(|&&v| v > 1e-9).count() <= 1);
            let a = u.band(-1).unwrap().weight_at(n).unwrap();
            let c = u.band(1).unwrap().weight_at(n).unwrap();
            prop_assert!(is_partial_isometry(&a, &tol).unwrap() || is_partial_isometry(&c, &tol).unwrap());
        }
    }

    #[test]
    fn conjugating_back_recovers_shift(seed in any::<u64>(), k in -2i64..=2) {
        let mut rng = common::rng(seed);
        let d = 2;
        let s = common::ei_shift(&mut rng, d, -2, 4);
        let v: Vec<_> = (-12..=12).map(|_| common::unitary(&mut rng, d)).collect();
        let u = BandedOperator::single_band(k, WeightSequence::windowed(-12, v).unwrap());
        let tol = Tolerance::new(1e-9, 1e-12);
        prop_assert!(verify_unitary(&u, -8, 8, &tol).unwrap().passed);
        let Conjugation::Shift(t) = conjugate_to_shift(&u, &s, -8, 8, &tol).unwrap() else {
            return Err(TestCaseError::fail("diagonal-form conjugate is a shift"));
        };
        let Conjugation::Shift(back) = conjugate_to_shift(&u.adjoint(), &t, -5, 5, &tol).unwrap() else {
            return Err(TestCaseError::fail("conjugating back is a shift"));
        };
        for n in -5..=5 {
            prop_assert!(back.weight(n).unwrap().distance(&s.weight(n).unwrap()) < 1e-8);
        }
    }
}
