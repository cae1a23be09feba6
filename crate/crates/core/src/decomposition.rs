//! The admissible decomposition `φ(L)f = c (π1 u + π2 f + π3 f)`.
//!
//! With `s = (δ'+δ) t^2`, the identity
//! `φ(L)f = c ∫_0^∞ Φ((δ'+δ)t^2) (t^2 L)^2 e^{-(δ'+δ)t^2 L} f dt/t`, `c = 2(δ'+δ)^2`,
//! is split at `t = m̃(x)/κ`. Below the split the factor `t^2 L e^{-δ t^2 L} f`
//! is cut by the admissible region into `u` (inside, `π1`) and its complement
//! (`π2`); both are pushed through `t^2 L e^{-δ' t^2 L}` with the Mehler
//! kernel. Above the split (`π3`) everything is spectral.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{discrete_admissibility, region_slice, Support};
use crate::mehler::{kernel_apply_t2l, TruncatedPolynomial};
use crate::multipliers::{apply_multiplier, PhiProfile};
use crate::quadrature::Adaptive;
use crate::special::upper_gamma_int;
use crate::spectral::{t2l_semigroup, HermiteExpansion};

/// Technical parameters `δ`, `δ'`, `κ` and the tolerance of the `dt/t` integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionParams {
    pub delta: f64,
    pub delta_prime: f64,
    pub kappa: f64,
    pub t_tol: f64,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams {
            delta: 1.0 / 128.0,
            delta_prime: 1.0 / 128.0,
            kappa: 4.0,
            t_tol: 1e-7,
        }
    }
}

/// Smallness thresholds appearing in the proofs.
pub const DELTA_PRIME_LIMIT: f64 = 1.0 / 64.0;
pub const DAMPING_SUM_LIMIT: f64 = 1.0 / 64.0;

/// Is `x` an exact power of 4 (`4^0 = 1` included)?
pub fn is_power_of_four(x: f64) -> bool {
    if !(x >= 1.0) || !x.is_finite() {
        return false;
    }
    let e = x.log2().round();
    2f64.powi(e as i32) == x && (e as i64) % 2 == 0
}

impl DecompositionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta must be positive"));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime.is_finite()) {
            return Err(Error::invalid("delta' must be positive"));
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return Err(Error::invalid("kappa must be at least 1"));
        }
        if !(self.t_tol > 0.0) {
            return Err(Error::invalid("t_tol must be positive"));
        }
        Ok(())
    }

    /// `δ' + δ`.
    pub fn damping_sum(&self) -> f64 {
        self.delta + self.delta_prime
    }

    /// Proof-side hypotheses that these parameters violate (empty if none).
    pub fn constraint_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.delta_prime < DELTA_PRIME_LIMIT) {
            out.push(format!(
                "delta' = {} violates delta' < 4^-3 (pi2 bound)",
                self.delta_prime
            ));
        }
        if !(8.0 * self.damping_sum() <= DAMPING_SUM_LIMIT) {
            out.push(format!(
                "8(delta' + delta) = {} violates 8(delta' + delta) <= 4^-3 (off-diagonal part of the pi3 bound)",
                8.0 * self.damping_sum()
            ));
        }
        if !is_power_of_four(self.kappa) {
            out.push(format!("kappa = {} is not a power of 4", self.kappa));
        }
        out
    }
}

/// `c_{δ,δ'} = 2(δ'+δ)^2`.
pub fn scaling_constant(delta: f64, delta_prime: f64) -> Result<f64> {
    if !(delta > 0.0 && delta_prime > 0.0) {
        return Err(Error::invalid("delta and delta' must be positive"));
    }
    let s = delta + delta_prime;
    Ok(2.0 * s * s)
}

/// `u(·, t) = 1_D(·, t) t^2 L e^{-δ t^2 L} f`.
#[derive(Debug, Clone)]
pub struct UField {
    pub f: HermiteExpansion<f64>,
    pub delta: f64,
}

pub fn build_u(f: &HermiteExpansion<f64>, delta: f64) -> Result<UField> {
    if !f.is_zero_mean() {
        return Err(Error::Precondition("u is built from zero-mean polynomials only".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    Ok(UField { f: f.clone(), delta })
}

impl UField {
    /// `[t^2 L e^{-δ t^2 L} f](y)`, without the cut-off.
    pub fn uncut(&self, y: f64, t: f64) -> Complex64 {
        let a = t * t;
        self.f.eval_weighted(y, |k| {
            let ak = a * k as f64;
            ak * (-self.delta * ak).exp()
        })
    }

    /// `u(y, t)`, zero outside the admissible region.
    pub fn eval(&self, y: f64, t: f64) -> Complex64 {
        if t > 0.0 && t < discrete_admissibility(y) {
            self.uncut(y, t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// The polynomial `t^2 L e^{-δ t^2 L} f`.
    pub fn slice_polynomial(&self, t: f64) -> Result<HermiteExpansion<f64>> {
        t2l_semigroup(&self.f, t, self.delta)
    }

    /// `u(·, t)` as a truncated polynomial.
    pub fn inside(&self, t: f64) -> Result<TruncatedPolynomial<f64>> {
        let slice = region_slice(t)?;
        Ok(TruncatedPolynomial::new(self.slice_polynomial(t)?, slice.inside()))
    }

    /// `1_{D^c}(·, t) t^2 L e^{-δ t^2 L} f` as a truncated polynomial.
    pub fn outside(&self, t: f64) -> Result<TruncatedPolynomial<f64>> {
        let slice = region_slice(t)?;
        Ok(TruncatedPolynomial::new(self.slice_polynomial(t)?, slice.outside()))
    }
}

/// Octaves below the upper limit covered by the `dt/t` integrals of `π1`, `π2`;
/// the integrand is `O(t^4)`, so the omitted part is below `2^{-4·18}` relative.
const OUTER_OCTAVES: i32 = 18;

/// Tolerance of the kernel quadratures nested inside the `dt/t` integrals.
const KERNEL_TOL: f64 = 1e-10;

/// `∫_0^{upper} F(t) dt/t` over `σ = ln t`, broken at every dyadic `t = 2^{-k}`
/// (where the region slice changes).
fn dyadic_log_integral<F>(upper: f64, t_tol: f64, abs_tol: f64, what: &'static str, mut inner: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let lower = upper * 2f64.powi(-OUTER_OCTAVES);
    let mut breaks = vec![lower.ln(), upper.ln()];
    let mut p = 1.0f64;
    while p > lower {
        if p < upper {
            breaks.push(p.ln());
        }
        p /= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut failure: Option<Error> = None;
    let quad = Adaptive::new(t_tol).with_abs_tol(abs_tol).with_max_intervals(2000);
    let est = quad
        .integrate(
            |s: f64| {
                if failure.is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                match inner(s.exp()) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            &breaks,
        )
        .map_err(|e| match e {
            Error::NonConvergence { detail, .. } => Error::NonConvergence {
                what,
                detail: format!("outer dt/t integral (sigma = ln t): {detail}"),
            },
            other => other,
        })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// Absolute floor of the outer integrals: `10^-3 t_tol ‖f‖_2 / c`, i.e.
/// `10^-3 t_tol ‖f‖_2` once multiplied by `c` (the units of `φ(L)f`). Without
/// it, points where the integral vanishes (e.g. odd `f` at `x = 0`) would
/// chase a target below the noise of the nested kernel quadratures.
fn outer_abs_tol(f: &HermiteExpansion<f64>, params: &DecompositionParams) -> f64 {
    let s = params.damping_sum();
    1e-3 * params.t_tol * f.l2_norm() / (2.0 * s * s)
}

/// `Φ̃(t^2) = Φ((δ'+δ) t^2)`.
fn phi_tilde(phi: &PhiProfile, params: &DecompositionParams, t: f64) -> Complex64 {
    phi.phi(params.damping_sum() * t * t)
}

/// `π1 u(x) = ∫_0^{m̃(x)/κ} Φ̃(t^2) t^2 L e^{-δ' t^2 L} u(·, t)(x) dt/t`.
pub fn pi1(u: &UField, phi: &PhiProfile, params: &DecompositionParams, x: f64) -> Result<Complex64> {
    params.validate()?;
    if u.f.l2_norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let upper = discrete_admissibility(x) / params.kappa;
    dyadic_log_integral(upper, params.t_tol, outer_abs_tol(&u.f, params), "pi1", |t| {
        let g = u.inside(t)?;
        Ok(phi_tilde(phi, params, t) * kernel_apply_t2l(&g, t, params.delta_prime, x, KERNEL_TOL)?)
    })
}

/// `π2 f(x)`: as `π1` with the complement `1_{D^c}(·, t)` in place of `1_D`.
pub fn pi2(f: &HermiteExpansion<f64>, phi: &PhiProfile, params: &DecompositionParams, x: f64) -> Result<Complex64> {
    params.validate()?;
    let u = build_u(f, params.delta)?;
    let upper = discrete_admissibility(x) / params.kappa;
    dyadic_log_integral(upper, params.t_tol, outer_abs_tol(f, params), "pi2", |t| {
        let g = u.outside(t)?;
        Ok(phi_tilde(phi, params, t) * kernel_apply_t2l(&g, t, params.delta_prime, x, KERNEL_TOL)?)
    })
}

/// `∫_{s_lo}^{s_hi} Φ(s) s e^{-sk} ds` for `k >= 1`, with `s_hi = ∞` allowed
/// (the tail is then cut where the growth majorant certifies it below `tail_tol`).
fn phi_moment(phi: &PhiProfile, k: usize, s_lo: f64, s_hi: f64, tol: f64, tail_tol: f64) -> Result<Complex64> {
    let kf = k as f64;
    let growth = phi.growth;
    let hi = if s_hi.is_finite() {
        s_hi
    } else {
        // ∫_S^∞ |Φ(s)| s e^{-sk} ds <= C ∫_S^∞ max(1,s)^N s e^{-ks} ds <= C Γ(N+2, kS) / k^{N+2} for S >= 1
        let n = growth.degree + 2;
        let mut s = (s_lo * 2.0).max(1.0);
        loop {
            let tail = growth.constant * upper_gamma_int(n, kf * s) / kf.powi(n as i32);
            if tail <= tail_tol {
                break s;
            }
            s *= 1.5;
            if s > 1e8 {
                return Err(Error::no_convergence("pi3", "tail bound unattainable"));
            }
        }
    };
    if !(hi > s_lo) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // geometric panels (ratio 2) plus the profile's own breakpoints
    let mut breaks = vec![s_lo];
    let mut b = s_lo * 2.0;
    while b < hi {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(hi);
    breaks.extend(phi.breakpoints.iter().copied().filter(|&p| p > s_lo && p < hi));
    breaks.sort_by(f64::total_cmp);
    let mut violation: Option<f64> = None;
    let bound = |s: f64| growth.constant * s.max(1.0).powi(growth.degree as i32) * (1.0 + 1e-9) + 1e-300;
    let est = Adaptive::new(tol)
        .with_abs_tol(tail_tol * 1e-3)
        .with_max_intervals(4000)
        .integrate(
            |s: f64| {
                let v = phi.phi(s);
                if v.norm() > bound(s) {
                    violation.get_or_insert(s);
                }
                v * (s * (-s * kf).exp())
            },
            &breaks,
        )?;
    if let Some(s) = violation {
        return Err(Error::Precondition(format!(
            "|Φ({s})| exceeds the declared growth bound {} max(1,s)^{}",
            growth.constant, growth.degree
        )));
    }
    Ok(est.value)
}

/// Spectral weights `w_k` with `π3 f(x) = Σ_k w_k c_k h_k(x)`.
fn pi3_weights(phi: &PhiProfile, params: &DecompositionParams, degree: usize, x: f64) -> Result<Vec<Complex64>> {
    let sum = params.damping_sum();
    let a = discrete_admissibility(x) / params.kappa;
    let s_a = sum * a * a;
    let prefactor = 1.0 / (2.0 * sum * sum);
    (0..=degree)
        .map(|k| {
            if k == 0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let kf = k as f64;
            // I_k = k^2 / (2(δ'+δ)^2) ∫_{s_a}^∞ Φ(s) s e^{-sk} ds
            let tail_tol = 0.1 * params.t_tol / (kf * kf);
            let m = phi_moment(phi, k, s_a, f64::INFINITY, params.t_tol * 1e-2, tail_tol)?;
            Ok(m * (prefactor * kf * kf))
        })
        .collect()
}

/// `π3 f(x) = ∫_{m̃(x)/κ}^∞ Φ̃(t^2) (t^2 L)^2 e^{-(δ'+δ) t^2 L} f(x) dt/t`, spectrally.
pub fn pi3(f: &HermiteExpansion<f64>, phi: &PhiProfile, params: &DecompositionParams, x: f64) -> Result<Complex64> {
    params.validate()?;
    if !f.is_zero_mean() {
        return Err(Error::Precondition("pi3 acts on zero-mean polynomials".into()));
    }
    let w = pi3_weights(phi, params, f.degree(), x)?;
    Ok(f.eval_weighted_complex(x, |k| w[k]))
}

/// `∫_0^{m̃(x)/κ} Φ̃(t^2) (t^2 L)^2 e^{-(δ'+δ) t^2 L} f(x) dt/t`, spectrally: the
/// value that `π1 u + π2 f` must reproduce.
pub fn head_spectral(
    f: &HermiteExpansion<f64>,
    phi: &PhiProfile,
    params: &DecompositionParams,
    x: f64,
) -> Result<Complex64> {
    params.validate()?;
    let sum = params.damping_sum();
    let a = discrete_admissibility(x) / params.kappa;
    let s_a = sum * a * a;
    let prefactor = 1.0 / (2.0 * sum * sum);
    let w: Vec<Complex64> = (0..=f.degree())
        .map(|k| {
            if k == 0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let kf = k as f64;
            let lo = s_a * 2f64.powi(-2 * OUTER_OCTAVES);
            let m = phi_moment(phi, k, lo, s_a, params.t_tol * 1e-2, 0.0)?;
            Ok(m * (prefactor * kf * kf))
        })
        .collect::<Result<_>>()?;
    Ok(f.eval_weighted_complex(x, |k| w[k]))
}

/// Per-point pieces of the reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionPoint {
    pub x: f64,
    pub multiplier_value: [f64; 2],
    pub pi1: [f64; 2],
    pub pi2: [f64; 2],
    pub pi3: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub scaling_constant: f64,
    pub points: Vec<ReconstructionPoint>,
    pub max_residual: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `max_x |φ(L)f(x) - c (π1 u + π2 f + π3 f)(x)|` with all pieces.
pub fn reconstruct(
    f: &HermiteExpansion<f64>,
    phi: &PhiProfile,
    params: &DecompositionParams,
    grid: &[f64],
) -> Result<Reconstruction> {
    params.validate()?;
    if !f.is_zero_mean() {
        return Err(Error::Precondition(
            "the decomposition acts on zero-mean polynomials".into(),
        ));
    }
    let c = scaling_constant(params.delta, params.delta_prime)?;
    let target = apply_multiplier(f, phi, 1e-12)?;
    let u = build_u(f, params.delta)?;
    let points: Vec<ReconstructionPoint> = grid
        .par_iter()
        .map(|&x| {
            let p1 = pi1(&u, phi, params, x)?;
            let p2 = pi2(f, phi, params, x)?;
            let p3 = pi3(f, phi, params, x)?;
            let want = target.eval(x);
            Ok(ReconstructionPoint {
                x,
                multiplier_value: pair(want),
                pi1: pair(p1),
                pi2: pair(p2),
                pi3: pair(p3),
                residual: (want - (p1 + p2 + p3) * c).norm(),
            })
        })
        .collect::<Result<_>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(Reconstruction {
        scaling_constant: c,
        points,
        max_residual,
    })
}

/// `max_x |φ(L)f(x) - c (π1 u + π2 f + π3 f)(x)|`.
pub fn reconstruction_residual(
    f: &HermiteExpansion<f64>,
    phi: &PhiProfile,
    params: &DecompositionParams,
    grid: &[f64],
) -> Result<f64> {
    reconstruct(f, phi, params, grid).map(|r| r.max_residual)
}

/// The 7-point grid `{0, ±0.5, ±1, ±2}`.
pub const RESIDUAL_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Support of the complement slice at height `t` (helper for tail checks).
pub fn complement_support(t: f64) -> Result<Support<f64>> {
    Ok(region_slice(t)?.outside())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianContext;
    use crate::multipliers::{make_phi, PhiKind};

    fn poly(terms: &[(usize, f64)]) -> HermiteExpansion<f64> {
        HermiteExpansion::from_terms(terms, GaussianContext::default()).unwrap()
    }

    #[test]
    fn scaling_constant_examples() {
        assert_eq!(scaling_constant(1.0 / 128.0, 1.0 / 128.0).unwrap(), 1.0 / 2048.0);
        let half = 0.5 / 2f64.sqrt();
        assert!((scaling_constant(half, half).unwrap() - 1.0).abs() < 1e-15);
        assert!(scaling_constant(0.0, 1.0).is_err());
    }

    #[test]
    fn scalar_reconstruction_per_eigenvalue() {
        let params = DecompositionParams::default();
        let c = scaling_constant(params.delta, params.delta_prime).unwrap();
        let sum = params.damping_sum();
        for kind in [
            PhiKind::Constant,
            PhiKind::ImaginaryPower(1.0),
            PhiKind::DampedImaginary(1.0),
        ] {
            let phi = make_phi(kind).unwrap();
            for k in 1..=3usize {
                // c ∫_0^∞ Φ((δ'+δ)t^2)(t^2 k)^2 e^{-(δ'+δ)t^2 k} dt/t in the t variable
                let kf = k as f64;
                let integrand = |s: f64| {
                    let t = s.exp();
                    let a = t * t * kf;
                    phi.phi(sum * t * t) * (a * a * (-sum * a).exp())
                };
                let breaks: Vec<f64> = (0..=80).map(|i| -12.0 + 0.25 * i as f64).collect();
                let v = Adaptive::new(1e-12).integrate(integrand, &breaks).unwrap().value * c;
                let want = crate::multipliers::phi_lambda(&phi, kf, 1e-12).unwrap();
                assert!((v - want).norm() < 1e-8, "{kind:?} k={k}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn u_field_examples() {
        let f = poly(&[(1, 1.0)]);
        let u = build_u(&f, 1.0 / 128.0).unwrap();
        let want = 0.25 * (-0.25f64 / 128.0).exp() * 2f64.sqrt() * 0.5;
        assert!((u.eval(0.5, 0.5).re - want).abs() < 1e-15);
        assert_eq!(u.eval(3.0, 0.5).norm(), 0.0);
        assert_eq!(u.eval(0.1, 1.0).norm(), 0.0);
        assert!(build_u(&poly(&[(0, 1.0), (1, 1.0)]), 0.1).is_err());
    }

    #[test]
    fn partition_identity_is_exact() {
        let f = poly(&[(1, 1.0), (3, -0.4)]);
        let u = build_u(&f, 1.0 / 128.0).unwrap();
        for &y in &[0.0, 0.7, 1.0, 1.9, 3.0, 5.0, -9.0] {
            for &t in &[0.01, 0.1, 0.3, 0.6, 0.99, 1.5] {
                let inside = u.eval(y, t);
                let outside = if t < discrete_admissibility(y) {
                    Complex64::new(0.0, 0.0)
                } else {
                    u.uncut(y, t)
                };
                assert_eq!(inside + outside, u.uncut(y, t));
            }
        }
    }

    #[test]
    fn pi3_closed_form() {
        let params = DecompositionParams::default();
        let phi = make_phi(PhiKind::Constant).unwrap();
        let f = poly(&[(1, 1.0)]);
        assert_eq!(pi3(&f, &phi, &params, 0.0).unwrap().norm(), 0.0);
        let v = pi3(&f, &phi, &params, 1.0).unwrap();
        // ½ Γ(2, s_a) / (δ'+δ)^2 · √2 with s_a = 1/4096, 40-digit reference
        assert!((v.re - 2_896.309_289_437_400_6).abs() < 1e-8 * 2896.3, "{v}");
        assert!(pi3(&poly(&[(0, 1.0)]), &phi, &params, 1.0).is_err());
    }

    #[test]
    fn pi3_growth_violation_is_reported() {
        use crate::multipliers::{ClaimedConditions, Growth, Profile};
        use std::sync::Arc;
        let fast: Profile = Arc::new(|t| Complex64::new(t * t, 0.0));
        let profile = PhiProfile::custom(
            "t^2",
            fast,
            Some(Arc::new(|t| Complex64::new(2.0 * t, 0.0))),
            Some(Arc::new(|_| Complex64::new(2.0, 0.0))),
            ClaimedConditions {
                bounded: false,
                condition_d: false,
                condition_p: Some(0),
            },
            Growth {
                constant: 1.0,
                degree: 0,
            },
        )
        .unwrap();
        let e = pi3(&poly(&[(1, 1.0)]), &profile, &DecompositionParams::default(), 1.0).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn constraints() {
        let p = DecompositionParams::default();
        // the defaults satisfy δ' < 4^-3 but not 8(δ'+δ) <= 4^-3
        let v = p.constraint_violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("8(delta' + delta)"));
        let bad = DecompositionParams {
            delta: 0.5,
            delta_prime: 0.5,
            kappa: 8.0,
            ..p
        };
        assert_eq!(bad.constraint_violations().len(), 3);
        assert!(is_power_of_four(1.0) && is_power_of_four(4.0) && is_power_of_four(16.0));
        assert!(!is_power_of_four(2.0) && !is_power_of_four(8.0) && !is_power_of_four(5.0));
    }

    #[test]
    fn pi2_at_origin_is_a_gaussian_tail() {
        let params = DecompositionParams::default();
        let phi = make_phi(PhiKind::Constant).unwrap();
        let f = poly(&[(1, 1.0)]);
        let v = pi2(&f, &phi, &params, 0.0).unwrap();
        assert!(v.norm() <= 1e-3 * f.l2_norm(), "{v}");
    }
}
