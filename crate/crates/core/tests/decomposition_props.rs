mod common;

use num_complex::Complex64;
use ou_harmonic::decomposition::{
    build_u, scaling_constant, DecompositionParams, DAMPING_SUM_LIMIT, DELTA_PRIME_LIMIT,
};
use ou_harmonic::gaussian::discrete_admissibility;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn admissible_partition_is_exact(
        f in common::polynomial(8, true),
        delta in 1e-3f64..0.5,
        y in -40.0f64..40.0,
        t in 1e-3f64..3.0,
    ) {
        let u = build_u(&f, delta).unwrap();
        let outside = if t < discrete_admissibility(y) { Complex64::new(0.0, 0.0) } else { u.uncut(y, t) };
        prop_assert_eq!(u.eval(y, t) + outside, u.uncut(y, t));
    }

    #[test]
    fn scaling_constant_closed_form(delta in 1e-4f64..1.0, delta_prime in 1e-4f64..1.0) {
        let s = delta + delta_prime;
        prop_assert_eq!(scaling_constant(delta, delta_prime).unwrap(), 2.0 * s * s);
    }

    #[test]
    fn constraint_flags_match_the_thresholds(delta in 1e-4f64..0.1, delta_prime in 1e-4f64..0.1, log4_kappa in 0u32..4) {
        let params = DecompositionParams { delta, delta_prime, kappa: 4f64.powi(log4_kappa as i32), ..Default::default() };
        let flags = params.constraint_violations();
        let expected = usize::from(delta_prime >= DELTA_PRIME_LIMIT) + usize::from(8.0 * (delta + delta_prime) > DAMPING_SUM_LIMIT);
        prop_assert_eq!(flags.len(), expected, "{:?}", flags);
    }
}

#[test]
fn kappa_off_the_powers_of_four_is_flagged() {
    let params = DecompositionParams {
        kappa: 8.0,
        ..Default::default()
    };
    assert!(params.constraint_violations().iter().any(|v| v.contains("kappa")));
    assert!(params.validate().is_ok());
}
