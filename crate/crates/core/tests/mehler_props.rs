mod common;

use ou_harmonic::gaussian::hermite_orthonormal;
use ou_harmonic::mehler::{kernel_apply, kernel_mass, mehler_kernel, mehler_log_kernel, TruncatedPolynomial};
use ou_harmonic::spectral::semigroup;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn kernel_is_symmetric(t in 1e-3f64..10.0, x in -20.0f64..20.0, y in -20.0f64..20.0) {
        prop_assert_eq!(mehler_log_kernel(t, x, y).unwrap().to_bits(), mehler_log_kernel(t, y, x).unwrap().to_bits());
        prop_assert_eq!(mehler_kernel(t, x, y).unwrap().to_bits(), mehler_kernel(t, y, x).unwrap().to_bits());
    }

    #[test]
    fn kernel_is_positive(t in 1e-3f64..10.0, x in -20.0f64..20.0, y in -20.0f64..20.0) {
        let ln_m = mehler_log_kernel(t, x, y).unwrap();
        prop_assert!(ln_m.is_finite());
        prop_assert!(mehler_kernel(t, x, y).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_is_conservative(t in 0.01f64..3.0, x in -2.0f64..2.0) {
        let mass = kernel_mass(t, x, 1e-13).unwrap();
        prop_assert!((mass - 1.0).abs() <= 1e-10, "mass {mass} at t = {t}, x = {x}");
    }

    #[test]
    fn kernel_matches_spectral_side(f in common::polynomial(8, false), s in 0.01f64..2.0, x in -3.0f64..3.0) {
        let via_kernel = kernel_apply(&TruncatedPolynomial::whole(f.clone()), s, x, 1e-13).unwrap();
        let spectral = semigroup(&f, s).unwrap().eval(x);
        // the error is relative to the size of the individual terms
        let scale: f64 = f.coefficients().iter().enumerate().map(|(k, c)| c.norm() * hermite_orthonormal(k, x).abs().max(1.0)).sum();
        prop_assert!((via_kernel - spectral).norm() <= 1e-8 * scale);
    }
}
