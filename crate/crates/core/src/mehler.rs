//! The Mehler kernel of `e^{-tL}` with respect to γ, its time derivative, and
//! kernel-side application of `e^{-sL}` and `L e^{-sL}` to polynomials cut off
//! to a symmetric set.
//!
//! For fixed `x`, `M_s(x, y) dγ(y)` is exactly the normal law with mean
//! `e^{-s} x` and variance `(1 - e^{-2s}) / 2`. Kernel integrals are therefore
//! computed in the standardised variable `z = (y - mean) / sd`, which makes the
//! panel density scale like `1 / sqrt(1 - e^{-2s})` automatically. Weights are
//! taken relative to an anchor point of each interval, so contributions from
//! supports many standard deviations away stay representable and free of
//! cancellation. [`kernel_mass`] integrates the printed kernel directly and
//! serves as an independent check of the identity.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::Support;
use crate::quadrature::Adaptive;
use crate::real::Real;
use crate::spectral::HermiteExpansion;

/// Half-width of the integration window, in standard deviations.
const WINDOW_SDS: f64 = 12.0;
/// Decay (in nats) required across the window when the mean lies outside the support.
const FAR_WINDOW_NATS: f64 = 60.0;

fn check_time<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "kernel time must be positive and finite, got {t}"
        )))
    }
}

/// Coefficients `(log_norm, a, b)` with `ln M_t = log_norm - a (x-y)^2 + b (x^2+y^2)`.
fn log_coefficients<T: Real>(t: T) -> (T, T, T) {
    let u = (-t).exp();
    let one_minus_u2 = -(-T::lit(2.0) * t).exp_m1();
    let log_norm = -one_minus_u2.ln() / T::lit(2.0);
    let a = u / one_minus_u2;
    let b = u / (T::one() + u);
    (log_norm, a, b)
}

/// `ln M_t(x, y)`.
pub fn mehler_log_kernel<T: Real>(t: T, x: T, y: T) -> Result<T> {
    check_time(t)?;
    let (log_norm, a, b) = log_coefficients(t);
    let d = x - y;
    Ok(log_norm - a * d * d + b * (x * x + y * y))
}

/// `M_t(x, y)`, one exponentiation of the log-domain expression; overflow is an error.
pub fn mehler_kernel<T: Real>(t: T, x: T, y: T) -> Result<T> {
    let l = mehler_log_kernel(t, x, y)?;
    if l > T::ln_max() {
        return Err(Error::Overflow { log_value: l.as_f64() });
    }
    Ok(l.exp())
}

/// `∂_t ln M_t(x, y)`, assembled term by term.
pub fn mehler_log_kernel_dt<T: Real>(t: T, x: T, y: T) -> Result<T> {
    check_time(t)?;
    let u = (-t).exp();
    let u2 = u * u;
    let one_minus_u2 = -(-T::lit(2.0) * t).exp_m1();
    // d/dt of -(1/2) ln(1 - e^{-2t})
    let norm_term = -u2 / one_minus_u2;
    // d/dt of -a(t) with a = 1 / (2 sinh t): + cosh t / (2 sinh^2 t)
    let diag_term = u * (T::one() + u2) / (one_minus_u2 * one_minus_u2);
    // d/dt of b(t) = 1 / (e^t + 1)
    let radial_term = -u / ((T::one() + u) * (T::one() + u));
    let d = x - y;
    Ok(norm_term + diag_term * d * d + radial_term * (x * x + y * y))
}

/// `∂_t M_t(x, y) = M_t(x, y) · ∂_t ln M_t(x, y)`.
pub fn mehler_kernel_dt<T: Real>(t: T, x: T, y: T) -> Result<T> {
    let m = mehler_kernel(t, x, y)?;
    Ok(m * mehler_log_kernel_dt(t, x, y)?)
}

/// A polynomial kept on a symmetric set and set to zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPolynomial<T> {
    pub poly: HermiteExpansion<T>,
    pub support: Support<T>,
}

impl<T: Real> TruncatedPolynomial<T> {
    pub fn new(poly: HermiteExpansion<T>, support: Support<T>) -> Self {
        TruncatedPolynomial { poly, support }
    }

    pub fn whole(poly: HermiteExpansion<T>) -> Self {
        Self::new(poly, Support::Whole)
    }

    pub fn eval(&self, y: T) -> Complex<T> {
        if self.support.contains(y) {
            self.poly.eval(y)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }
}

/// A value `e^{log_scale} · mantissa`, for results far outside the floating range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue<T> {
    pub log_scale: T,
    pub mantissa: Complex<T>,
}

impl<T: Real> ScaledValue<T> {
    pub fn zero() -> Self {
        ScaledValue {
            log_scale: T::neg_infinity(),
            mantissa: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> T {
        self.log_scale + self.mantissa.norm().ln()
    }

    pub fn value(&self) -> Complex<T> {
        if self.log_scale == T::neg_infinity() {
            return Complex::new(T::zero(), T::zero());
        }
        self.mantissa * self.log_scale.exp()
    }

    pub fn scale(self, factor: T) -> Self {
        ScaledValue {
            log_scale: self.log_scale,
            mantissa: self.mantissa * factor,
        }
    }
}

impl<T: Real> std::ops::Add for ScaledValue<T> {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        if other.log_scale == T::neg_infinity() {
            return self;
        }
        if self.log_scale == T::neg_infinity() {
            return other;
        }
        let top = self.log_scale.max(other.log_scale);
        ScaledValue {
            log_scale: top,
            mantissa: self.mantissa * (self.log_scale - top).exp() + other.mantissa * (other.log_scale - top).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    /// `e^{-sL}`
    Semigroup,
    /// `L e^{-sL} = -∂_s e^{-sL}`
    Generator,
}

/// Mean and standard deviation of the transition law `M_s(x, ·) dγ`.
fn transition_law<T: Real>(s: T, x: T) -> (T, T) {
    let mean = (-s).exp() * x;
    let var = -(-T::lit(2.0) * s).exp_m1() / T::lit(2.0);
    (mean, var.sqrt())
}

fn transition_integral<T: Real>(
    g: &TruncatedPolynomial<T>,
    s: T,
    x: T,
    tol: T,
    action: Action,
) -> Result<ScaledValue<T>> {
    check_time(s)?;
    if !(tol > T::zero()) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let two = T::lit(2.0);
    let (mean, sd) = transition_law(s, x);
    let var = sd * sd;
    // ∂_s ln N = (v'/(2v)) (z^2 - 1) + z μ'/σ with v' = e^{-2s}, μ' = -e^{-s} x
    let spread_rate = (-two * s).exp() / (two * var);
    let drift_rate = -(-s).exp() * x / sd;
    let half_ln_2pi = (two * T::PI()).ln() / two;
    let reach = mean.abs() + g.support.extent() + (T::lit(WINDOW_SDS) + T::one()) * sd;
    let quad = Adaptive::new(tol).with_max_intervals(8000);
    let mut total = ScaledValue::zero();
    for (a, b) in g.support.intervals(reach) {
        // the interval in the standardised variable
        let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
        let window = T::lit(WINDOW_SDS);
        // anchor z0 (nearest point to the mean) and offsets h in [h_lo, h_hi], z = z0 + h
        let (z0, h_lo, h_hi) = if za <= T::zero() && zb >= T::zero() {
            (T::zero(), (-window).max(za), window.min(zb))
        } else {
            let z0 = if za > T::zero() { za } else { zb };
            let w = window.min(T::lit(FAR_WINDOW_NATS) / z0.abs());
            if z0 > T::zero() {
                (z0, T::zero(), w.min(zb - za))
            } else {
                (z0, -(w.min(zb - za)), T::zero())
            }
        };
        if !(h_hi > h_lo) {
            continue;
        }
        let shift = -z0 * z0 / two - half_ln_2pi;
        let n = (h_hi - h_lo).ceil().to_usize().unwrap_or(1).clamp(1, 64);
        let integrand = |h: T| -> Complex<T> {
            // φ(z0 + h) / φ(z0) = exp(-h (2 z0 + h) / 2), free of cancellation
            let w = (-h * (two * z0 + h) / two).exp();
            let z = z0 + h;
            let y = mean + sd * z;
            let factor = match action {
                Action::Semigroup => w,
                Action::Generator => -w * (spread_rate * (z * z - T::one()) + drift_rate * z),
            };
            g.poly.eval(y) * factor
        };
        let est = quad.integrate_panels(integrand, h_lo, h_hi, n).map_err(|e| match e {
            Error::NonConvergence { detail, .. } => Error::NonConvergence {
                what: "kernel quadrature",
                detail: format!("s = {}, x = {}: {detail}", s.as_f64(), x.as_f64()),
            },
            other => other,
        })?;
        total = total
            + ScaledValue {
                log_scale: shift,
                mantissa: est.value,
            };
    }
    Ok(total)
}

/// `∫ M_s(x, y) g(y) dγ(y)`.
pub fn kernel_apply<T: Real>(g: &TruncatedPolynomial<T>, s: T, x: T, tol: T) -> Result<Complex<T>> {
    transition_integral(g, s, x, tol, Action::Semigroup).map(|v| v.value())
}

/// `∫ M_s(x, y) g(y) dγ(y)` as a log-scaled value.
pub fn kernel_apply_scaled<T: Real>(g: &TruncatedPolynomial<T>, s: T, x: T, tol: T) -> Result<ScaledValue<T>> {
    transition_integral(g, s, x, tol, Action::Semigroup)
}

/// `[L e^{-sL} g](x) = -∫ ∂_s M_s(x, y) g(y) dγ(y)`.
pub fn kernel_apply_generator<T: Real>(g: &TruncatedPolynomial<T>, s: T, x: T, tol: T) -> Result<Complex<T>> {
    transition_integral(g, s, x, tol, Action::Generator).map(|v| v.value())
}

/// `[L e^{-sL} g](x)` as a log-scaled value.
pub fn kernel_apply_generator_scaled<T: Real>(
    g: &TruncatedPolynomial<T>,
    s: T,
    x: T,
    tol: T,
) -> Result<ScaledValue<T>> {
    transition_integral(g, s, x, tol, Action::Generator)
}

/// `[t^2 L e^{-δ' t^2 L} g](x) = -t^2 ∫ (∂_s M_s)(x, y)|_{s = δ' t^2} g(y) dγ(y)`.
pub fn kernel_apply_t2l<T: Real>(g: &TruncatedPolynomial<T>, t: T, damping: T, x: T, tol: T) -> Result<Complex<T>> {
    if !(t > T::zero() && damping > T::zero()) {
        return Err(Error::invalid("scale and damping must be positive"));
    }
    kernel_apply_generator(g, damping * t * t, x, tol).map(|v| v * (t * t))
}

/// `∫ M_t(x, y) dγ(y)` by direct quadrature of the kernel (conservativity check).
pub fn kernel_mass<T: Real>(t: T, x: T, tol: T) -> Result<T> {
    let (mean, sd) = transition_law(t, x);
    let window = T::lit(WINDOW_SDS) * sd;
    let quad = Adaptive::new(tol).with_max_intervals(8000);
    let mut failure = None;
    let est = quad.integrate_panels(
        |y: T| match mehler_kernel(t, x, y) {
            Ok(m) => m * crate::gaussian::gaussian_density(y),
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        mean - window,
        mean + window,
        24,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}
