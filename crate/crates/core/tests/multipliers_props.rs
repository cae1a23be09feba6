mod common;

use num_complex::Complex64;
use ou_harmonic::multipliers::{
    apply_multiplier, check_bounds, check_condition_d, check_condition_p, make_phi, phi_lambda, PhiKind, PhiProfile,
};
use ou_harmonic::spectral::semigroup;
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = PhiProfile> {
    prop_oneof![
        Just(PhiKind::Constant),
        (0.1f64..3.0).prop_map(PhiKind::ImaginaryPower),
        (0.1f64..3.0).prop_map(PhiKind::DampedImaginary),
    ]
    .prop_map(|kind| make_phi(kind).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn imaginary_power_is_unimodular(tau in 0.1f64..3.0, lambda in 1usize..=10) {
        let phi = make_phi(PhiKind::ImaginaryPower(tau)).unwrap();
        let v = phi_lambda(&phi, lambda as f64, 1e-12).unwrap();
        prop_assert!((v.norm() - 1.0).abs() <= 1e-8, "|φ({lambda})| = {}", v.norm());
    }

    #[test]
    fn phi_lambda_is_linear_in_profile(
        a in profile(),
        b in profile(),
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
        beta in (-2.0f64..2.0, -2.0f64..2.0),
        lambda in 1usize..=6,
    ) {
        let (alpha, beta) = (Complex64::new(alpha.0, alpha.1), Complex64::new(beta.0, beta.1));
        let combined = PhiProfile::combine(alpha, &a, beta, &b);
        let l = lambda as f64;
        let lhs = phi_lambda(&combined, l, 1e-12).unwrap();
        let rhs = alpha * phi_lambda(&a, l, 1e-12).unwrap() + beta * phi_lambda(&b, l, 1e-12).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * (alpha.norm() + beta.norm()).max(1.0));
    }

    #[test]
    fn multiplier_commutes_with_semigroup(phi in profile(), f in common::polynomial(6, true), t in 0.0f64..2.0) {
        let a = apply_multiplier(&semigroup(&f, t).unwrap(), &phi, 1e-12).unwrap();
        let b = semigroup(&apply_multiplier(&f, &phi, 1e-12).unwrap(), t).unwrap();
        prop_assert!(a.coefficient_distance(&b) <= 1e-10);
        prop_assert!(a.is_zero_mean());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn condition_checkers_are_consistent(tau in 0.25f64..2.5) {
        let damped = make_phi(PhiKind::DampedImaginary(tau)).unwrap();
        prop_assert!(check_bounds(&damped, 400).finite);
        prop_assert!(check_condition_d(&damped, 1e-8).unwrap().holds);
        prop_assert!(check_condition_p(&damped, 0).holds);

        let pure = make_phi(PhiKind::ImaginaryPower(tau)).unwrap();
        prop_assert!(check_bounds(&pure, 400).finite);
        prop_assert!(check_condition_p(&pure, 0).holds);
        prop_assert!(!check_condition_d(&pure, 1e-8).unwrap().holds);
    }
}
