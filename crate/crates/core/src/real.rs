//! Scalar abstraction shared by the generic numerical core.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::sync::OnceLock;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable by the generic routines (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static {
    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 / sqrt(pi)`.
    #[inline]
    fn frac_1_sqrt_pi() -> Self {
        Self::FRAC_2_SQRT_PI() / Self::lit(2.0)
    }

    /// Natural log of the largest finite value.
    fn ln_max() -> Self {
        Self::max_value().ln()
    }

    /// 16-point Gauss-Legendre nodes and weights on [-1, 1], cached per type.
    fn gauss_legendre_16() -> &'static [(Self, Self)];
}

fn gl16_f64() -> Vec<(f64, f64)> {
    let rule = crate::quadrature::gauss_legendre::<f64>(16);
    rule.nodes.into_iter().zip(rule.weights).collect()
}

impl Real for f64 {
    fn gauss_legendre_16() -> &'static [(Self, Self)] {
        static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
        RULE.get_or_init(gl16_f64)
    }
}

impl Real for f32 {
    fn gauss_legendre_16() -> &'static [(Self, Self)] {
        static RULE: OnceLock<Vec<(f32, f32)>> = OnceLock::new();
        RULE.get_or_init(|| gl16_f64().into_iter().map(|(x, w)| (x as f32, w as f32)).collect())
    }
}
