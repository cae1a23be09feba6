//! Strategies shared by the property tests.

#![allow(dead_code)]

use num_complex::Complex64;
use ou_harmonic::gaussian::GaussianContext;
use ou_harmonic::spectral::HermiteExpansion;
use proptest::prelude::*;

pub fn ctx() -> GaussianContext<f64> {
    GaussianContext::default()
}

/// Coefficients in the complex unit square for degrees `0..=degree_max`
/// (at least degree 1); `c_0 = 0` when `zero_mean`.
pub fn polynomial(degree_max: usize, zero_mean: bool) -> impl Strategy<Value = HermiteExpansion<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=degree_max + 1).prop_map(move |cs| {
        let mut coefficients: Vec<Complex64> = cs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        if zero_mean {
            coefficients[0] = Complex64::new(0.0, 0.0);
        }
        HermiteExpansion::new(coefficients, ctx()).unwrap()
    })
}

/// A polynomial that is not identically zero.
pub fn nonzero_polynomial(degree_max: usize, zero_mean: bool) -> impl Strategy<Value = HermiteExpansion<f64>> {
    polynomial(degree_max, zero_mean).prop_filter("nonzero", |f| f.l2_norm() > 1e-3)
}
