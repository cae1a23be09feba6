//! Ornstein–Uhlenbeck harmonic analysis on the Gaussian line.
//!
//! The numerical core (`gaussian`, `quadrature`, `spectral`, `mehler`) is
//! generic over a [`Real`] scalar; the aliases below fix it to `f64` or `f32`.
//! Multipliers, the admissible decomposition, tent spaces and the verification
//! harness work in `f64`.

// Comparisons are written `!(x > 0)` on purpose so that NaN is rejected too;
// long literals are reference digits kept exactly as printed.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod decomposition;
mod error;
pub mod gaussian;
pub mod harness;
pub mod mehler;
pub mod multipliers;
pub mod quadrature;
mod real;
pub mod special;
pub mod spectral;
pub mod tent;

pub use error::{Error, Result};
pub use real::Real;

pub type HermiteExpansion64 = spectral::HermiteExpansion<f64>;
pub type HermiteExpansion32 = spectral::HermiteExpansion<f32>;
pub type SpectralSymbol64 = spectral::SpectralSymbol<f64>;
pub type SpectralSymbol32 = spectral::SpectralSymbol<f32>;
pub type GaussianContext64 = gaussian::GaussianContext<f64>;
pub type GaussianContext32 = gaussian::GaussianContext<f32>;
pub type Support64 = gaussian::Support<f64>;
pub type Support32 = gaussian::Support<f32>;
pub type TruncatedPolynomial64 = mehler::TruncatedPolynomial<f64>;
pub type TruncatedPolynomial32 = mehler::TruncatedPolynomial<f32>;
