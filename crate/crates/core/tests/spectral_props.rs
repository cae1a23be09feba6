mod common;

use ou_harmonic::spectral::{apply_symbol, semigroup, SpectralSymbol};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn semigroup_law(f in common::polynomial(8, false), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let twice = semigroup(&semigroup(&f, s).unwrap(), t).unwrap();
        let once = semigroup(&f, s + t).unwrap();
        prop_assert!(twice.coefficient_distance(&once) <= 1e-12);
    }

    #[test]
    fn symbol_composition(f in common::polynomial(8, false), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let (a, b) = (SpectralSymbol::heat(s), SpectralSymbol::t_l_heat(t));
        let composed = apply_symbol(&f, &a.then(&b));
        let sequential = apply_symbol(&apply_symbol(&f, &a), &b);
        prop_assert!(composed.coefficient_distance(&sequential) <= 1e-12);
    }

    #[test]
    fn mean_is_preserved(f in common::polynomial(8, false), t in 0.0f64..5.0) {
        prop_assert_eq!(semigroup(&f, t).unwrap().mean(), f.mean());
    }

    #[test]
    fn spectral_gap_contraction(f in common::polynomial(8, true), t in 0.0f64..5.0) {
        let lhs = semigroup(&f, t).unwrap().l2_norm();
        prop_assert!(lhs <= (-t).exp() * f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn spectral_gap_saturated_by_h1(a in -3.0f64..3.0, t in 0.0f64..5.0) {
        let f = ou_harmonic::spectral::HermiteExpansion::from_terms(&[(1, a)], common::ctx()).unwrap();
        let lhs = semigroup(&f, t).unwrap().l2_norm();
        let rhs = (-t).exp() * f.l2_norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn l1_contraction(f in common::polynomial(8, false), t in 0.01f64..3.0) {
        let lhs = semigroup(&f, t).unwrap().lp_norm(1.0, 1e-11).unwrap();
        let rhs = f.lp_norm(1.0, 1e-11).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }
}
