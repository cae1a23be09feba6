//! Laplace-transform-type multipliers `φ(λ) = ∫_0^∞ Φ(t) (tλ)^2 e^{-tλ} dt/t`:
//! profile functions, the boundedness and Conditions D / P checkers, the
//! scalar map `λ ↦ φ(λ)` and its action on Hermite expansions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::Adaptive;
use crate::special::{gamma_complex, upper_gamma_int};
use crate::spectral::{apply_symbol, HermiteExpansion, SpectralSymbol};

/// A map `(0, ∞) → ℂ`.
pub type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Which of the class conditions a profile is claimed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClaimedConditions {
    /// `sup (|Φ| + t|Φ'|) + sup_{t <= 1} |t^2 Φ''| < ∞`
    pub bounded: bool,
    /// `∫_1^∞ (|Φ'| + t|Φ''|) dt < ∞`
    pub condition_d: bool,
    /// `|Φ'| + t|Φ''| ≲ t^N` on `t >= 1`
    pub condition_p: Option<u32>,
}

/// Declared majorant `|Φ(t)| <= constant · max(1, t)^degree`, used to truncate tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    pub constant: f64,
    pub degree: u32,
}

/// A profile `Φ` with its first two derivatives.
#[derive(Clone)]
pub struct PhiProfile {
    pub label: String,
    phi: Profile,
    dphi: Profile,
    d2phi: Profile,
    pub claimed: ClaimedConditions,
    pub growth: Growth,
    /// Points in `t` where `Φ` is not analytic (quadrature breakpoints).
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for PhiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiProfile")
            .field("label", &self.label)
            .field("claimed", &self.claimed)
            .field("growth", &self.growth)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

/// Built-in profile families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiKind {
    /// `Φ ≡ 1`
    Constant,
    /// `Φ(t) = t^{-iτ} / Γ(2 - iτ)`
    ImaginaryPower(f64),
    /// `Φ(t) = t^{-iτ} χ(t)` with a C² cutoff `χ`
    DampedImaginary(f64),
}

/// Quintic cutoff: 1 on `(0, 1]`, 0 on `[2, ∞)`, with two continuous derivatives.
pub fn cutoff(t: f64) -> (f64, f64, f64) {
    if t <= 1.0 {
        (1.0, 0.0, 0.0)
    } else if t >= 2.0 {
        (0.0, 0.0, 0.0)
    } else {
        let s = t - 1.0;
        let value = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let first = -30.0 * s * s * (1.0 - s) * (1.0 - s);
        let second = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        (value, first, second)
    }
}

/// `t^{-iτ}`.
fn oscillation(tau: f64, t: f64) -> Complex64 {
    Complex64::new(0.0, -tau * t.ln()).exp()
}

pub fn make_phi(kind: PhiKind) -> Result<PhiProfile> {
    match kind {
        PhiKind::Constant => Ok(PhiProfile {
            label: "constant".into(),
            phi: Arc::new(|_| Complex64::new(1.0, 0.0)),
            dphi: Arc::new(|_| Complex64::new(0.0, 0.0)),
            d2phi: Arc::new(|_| Complex64::new(0.0, 0.0)),
            claimed: ClaimedConditions {
                bounded: true,
                condition_d: true,
                condition_p: Some(0),
            },
            growth: Growth {
                constant: 1.0,
                degree: 0,
            },
            breakpoints: vec![],
        }),
        PhiKind::ImaginaryPower(tau) => {
            check_tau(tau)?;
            let norm = gamma_complex(Complex64::new(2.0, -tau)).inv();
            let a = Complex64::new(0.0, -tau);
            let a2 = a * (a - 1.0);
            Ok(PhiProfile {
                label: format!("imaginary_power(tau={tau})"),
                phi: Arc::new(move |t| oscillation(tau, t) * norm),
                dphi: Arc::new(move |t| a * oscillation(tau, t) * norm / t),
                d2phi: Arc::new(move |t| a2 * oscillation(tau, t) * norm / (t * t)),
                claimed: ClaimedConditions {
                    bounded: true,
                    condition_d: false,
                    condition_p: Some(0),
                },
                growth: Growth {
                    constant: norm.norm(),
                    degree: 0,
                },
                breakpoints: vec![],
            })
        }
        PhiKind::DampedImaginary(tau) => {
            check_tau(tau)?;
            let a = Complex64::new(0.0, -tau);
            let a2 = a * (a - 1.0);
            Ok(PhiProfile {
                label: format!("damped_imaginary(tau={tau})"),
                phi: Arc::new(move |t| oscillation(tau, t) * cutoff(t).0),
                dphi: Arc::new(move |t| {
                    let (c, c1, _) = cutoff(t);
                    oscillation(tau, t) * (a * c / t + c1)
                }),
                d2phi: Arc::new(move |t| {
                    let (c, c1, c2) = cutoff(t);
                    oscillation(tau, t) * (a2 * c / (t * t) + 2.0 * a * c1 / t + c2)
                }),
                claimed: ClaimedConditions {
                    bounded: true,
                    condition_d: true,
                    condition_p: Some(0),
                },
                growth: Growth {
                    constant: 1.0,
                    degree: 0,
                },
                breakpoints: vec![1.0, 2.0],
            })
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tau must be a finite real number"))
    }
}

impl PhiProfile {
    /// A user-supplied profile; both derivatives are required.
    pub fn custom(
        label: impl Into<String>,
        phi: Profile,
        dphi: Option<Profile>,
        d2phi: Option<Profile>,
        claimed: ClaimedConditions,
        growth: Growth,
    ) -> Result<Self> {
        let (Some(dphi), Some(d2phi)) = (dphi, d2phi) else {
            return Err(Error::invalid("custom profiles must supply Φ' and Φ''"));
        };
        Ok(PhiProfile {
            label: label.into(),
            phi,
            dphi,
            d2phi,
            claimed,
            growth,
            breakpoints: vec![],
        })
    }

    pub fn phi(&self, t: f64) -> Complex64 {
        (self.phi)(t)
    }

    pub fn dphi(&self, t: f64) -> Complex64 {
        (self.dphi)(t)
    }

    pub fn d2phi(&self, t: f64) -> Complex64 {
        (self.d2phi)(t)
    }

    /// `α Φ_1 + β Φ_2`.
    pub fn combine(alpha: Complex64, a: &PhiProfile, beta: Complex64, b: &PhiProfile) -> PhiProfile {
        let lift = |fa: Profile, fb: Profile| -> Profile { Arc::new(move |t| alpha * fa(t) + beta * fb(t)) };
        let mut breakpoints = a.breakpoints.clone();
        breakpoints.extend(&b.breakpoints);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        PhiProfile {
            label: format!("({alpha})*{} + ({beta})*{}", a.label, b.label),
            phi: lift(a.phi.clone(), b.phi.clone()),
            dphi: lift(a.dphi.clone(), b.dphi.clone()),
            d2phi: lift(a.d2phi.clone(), b.d2phi.clone()),
            claimed: ClaimedConditions {
                bounded: a.claimed.bounded && b.claimed.bounded,
                condition_d: a.claimed.condition_d && b.claimed.condition_d,
                condition_p: match (a.claimed.condition_p, b.claimed.condition_p) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    _ => None,
                },
            },
            growth: Growth {
                constant: alpha.norm() * a.growth.constant + beta.norm() * b.growth.constant,
                degree: a.growth.degree.max(b.growth.degree),
            },
            breakpoints,
        }
    }

    /// Largest discrepancy between `Φ'`, `Φ''` and central difference quotients
    /// of `Φ`, `Φ'` on `samples` log-spaced points of `[1e-2, 1e2]`, measured
    /// relative to `1 + t|Φ'| + t^2|Φ''|`.
    pub fn derivative_discrepancy(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let t = 10f64.powf(-2.0 + 4.0 * i as f64 / (samples - 1) as f64);
            let h = 1e-5 * t;
            let d1 = (self.phi(t + h) - self.phi(t - h)) / (2.0 * h);
            let d2 = (self.dphi(t + h) - self.dphi(t - h)) / (2.0 * h);
            let scale = 1.0 + t * self.dphi(t).norm() + t * t * self.d2phi(t).norm();
            let e1 = t * (d1 - self.dphi(t)).norm() / scale;
            let e2 = t * t * (d2 - self.d2phi(t)).norm() / scale;
            worst = worst.max(e1).max(e2);
        }
        worst
    }
}

fn log_grid(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let samples = samples.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..samples).map(move |i| (a + (b - a) * i as f64 / (samples - 1) as f64).exp())
}

/// Suprema of the profile bounds `|Φ| + t|Φ'|` and `|t^2 Φ''|` over a log grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    /// `sup_{1e-6 <= t <= 1e6} |Φ(t)| + t|Φ'(t)|`
    pub sup_first: f64,
    pub argmax_first: f64,
    /// `sup_{1e-6 <= t <= 1} |t^2 Φ''(t)|`
    pub sup_second: f64,
    pub argmax_second: f64,
    /// Same suprema over the extended grid `[1e-8, 1e8]`.
    pub sup_first_extended: f64,
    pub sup_second_extended: f64,
    /// False if either supremum is non-finite or grows when the grid is extended.
    pub finite: bool,
}

fn sup_on<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    log_grid(lo, hi, samples).fold((0.0, lo), |(best, at), t| {
        let v = f(t);
        if !(v <= best) {
            (v, t)
        } else {
            (best, at)
        }
    })
}

pub fn check_bounds(profile: &PhiProfile, samples: usize) -> BoundsReport {
    let first = |t: f64| profile.phi(t).norm() + t * profile.dphi(t).norm();
    let second = |t: f64| t * t * profile.d2phi(t).norm();
    let (sup_first, argmax_first) = sup_on(first, 1e-6, 1e6, samples);
    let (sup_second, argmax_second) = sup_on(second, 1e-6, 1.0, samples);
    let (sup_first_extended, _) = sup_on(first, 1e-8, 1e8, samples + samples / 3);
    let (sup_second_extended, _) = sup_on(second, 1e-8, 1.0, samples + samples / 4);
    let stable = |base: f64, ext: f64| base.is_finite() && ext.is_finite() && ext <= base * 1.01 + 1e-300;
    BoundsReport {
        sup_first,
        argmax_first,
        sup_second,
        argmax_second,
        sup_first_extended,
        sup_second_extended,
        finite: stable(sup_first, sup_first_extended) && stable(sup_second, sup_second_extended),
    }
}

/// Result of the Condition D check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionDReport {
    pub holds: bool,
    /// `∫_1^T (|Φ'| + t|Φ''|) dt` at the last `T` reached.
    pub integral_estimate: f64,
    /// `(T, ∫_{T/2}^{T})` for each doubling step.
    pub increments: Vec<(f64, f64)>,
}

/// Number of doublings of `T` before Condition D is declared not to hold.
const CONDITION_D_DOUBLINGS: usize = 40;

pub fn check_condition_d(profile: &PhiProfile, tol: f64) -> Result<ConditionDReport> {
    let integrand = |t: f64| profile.dphi(t).norm() + t * profile.d2phi(t).norm();
    let quad = Adaptive::new(1e-10).with_abs_tol(tol * 1e-3);
    let mut total = 0.0;
    let mut increments = Vec::new();
    let mut lo = 1.0;
    for _ in 0..CONDITION_D_DOUBLINGS {
        let hi = 2.0 * lo;
        let mut breaks = vec![lo];
        breaks.extend(profile.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        breaks.push(hi);
        let inc = quad.integrate(integrand, &breaks)?.value;
        total += inc;
        increments.push((hi, inc));
        lo = hi;
        if inc < tol {
            return Ok(ConditionDReport {
                holds: true,
                integral_estimate: total,
                increments,
            });
        }
    }
    Ok(ConditionDReport {
        holds: false,
        integral_estimate: total,
        increments,
    })
}

/// Result of the Condition P check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionPReport {
    pub degree: u32,
    pub holds: bool,
    /// `sup_{1 <= t <= 1e4} (|Φ'| + t|Φ''|) / t^N`
    pub fitted_constant: f64,
    /// The same supremum over `[1, 1e8]`.
    pub extended_constant: f64,
}

pub fn check_condition_p(profile: &PhiProfile, degree: u32) -> ConditionPReport {
    let ratio = |t: f64| (profile.dphi(t).norm() + t * profile.d2phi(t).norm()) / t.powi(degree as i32);
    let (fitted_constant, _) = sup_on(ratio, 1.0, 1e4, 400);
    let (extended_constant, _) = sup_on(ratio, 1.0, 1e8, 800);
    let holds = fitted_constant.is_finite()
        && extended_constant.is_finite()
        && extended_constant <= fitted_constant * 1.01 + 1e-300;
    ConditionPReport {
        degree,
        holds,
        fitted_constant,
        extended_constant,
    }
}

/// `φ(λ) = ∫_0^∞ Φ(r/λ) r e^{-r} dr`, integrated in `σ = ln r`.
pub fn phi_lambda(profile: &PhiProfile, lambda: f64, tol: f64) -> Result<Complex64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda must be a finite non-negative number"));
    }
    if lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let Growth { constant, degree } = profile.growth;
    let c = constant.max(f64::MIN_POSITIVE);
    // head: |∫_0^{r0}| <= c r0^2 / 2 (for r0 <= λ)
    let r0 = (0.02 * tol / c).sqrt().min(lambda);
    // tail: |Φ(r/λ)| <= c max(1, r/λ)^N, so ∫_R^∞ <= c max(1, λ^{-N}) Γ(N+2, R)
    let scale = c * lambda.powi(-(degree as i32)).max(1.0);
    let mut r1 = 8.0;
    while scale * upper_gamma_int(degree + 2, r1) > 0.01 * tol {
        r1 *= 1.25;
        if r1 > 1e6 {
            return Err(Error::no_convergence(
                "multiplier quadrature",
                "tail bound unattainable",
            ));
        }
    }
    let (a, b) = (r0.ln(), r1.ln());
    let n = ((b - a) / 0.5).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    breaks.extend(
        profile
            .breakpoints
            .iter()
            .map(|&t| (t * lambda).ln())
            .filter(|&s| s > a && s < b),
    );
    breaks.sort_by(f64::total_cmp);
    let integrand = |s: f64| -> Complex64 {
        let r = s.exp();
        profile.phi(r / lambda) * (2.0 * s - r).exp()
    };
    let est = Adaptive::new(tol * 0.1)
        .with_abs_tol(tol * 0.01)
        .with_max_intervals(20_000)
        .integrate(integrand, &breaks)
        .map_err(|e| match e {
            Error::NonConvergence { detail, .. } => Error::NonConvergence {
                what: "multiplier quadrature",
                detail: format!("lambda = {lambda}: {detail}"),
            },
            other => other,
        })?;
    Ok(est.value)
}

/// `φ(L) f`: `c_k ↦ φ(k) c_k`, with `c_0 ↦ 0`.
pub fn apply_multiplier(f: &HermiteExpansion<f64>, profile: &PhiProfile, tol: f64) -> Result<HermiteExpansion<f64>> {
    let values: Vec<Complex64> = (0..=f.degree())
        .map(|k| phi_lambda(profile, k as f64, tol))
        .collect::<Result<_>>()?;
    let symbol = SpectralSymbol::new(profile.label.clone(), move |k| {
        values.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    });
    Ok(apply_symbol(f, &symbol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianContext;
    use crate::spectral::semigroup;

    #[test]
    fn profiles() {
        let c = make_phi(PhiKind::Constant).unwrap();
        assert_eq!(c.phi(5.0), Complex64::new(1.0, 0.0));
        assert_eq!(c.dphi(5.0), Complex64::new(0.0, 0.0));
        let ip = make_phi(PhiKind::ImaginaryPower(1.0)).unwrap();
        for t in [1e-3, 0.7, 5.0, 1e4] {
            assert!((ip.phi(t).norm() - 1.355_742_953_213_288_459).abs() < 1e-12);
        }
        let d = make_phi(PhiKind::DampedImaginary(1.0)).unwrap();
        assert_eq!(d.phi(3.0).norm(), 0.0);
        let want = Complex64::new(0.0, -(0.5f64).ln()).exp();
        assert!((d.phi(0.5) - want).norm() < 1e-15);
        assert!(make_phi(PhiKind::ImaginaryPower(f64::NAN)).is_err());
    }

    #[test]
    fn cutoff_spline() {
        assert_eq!(cutoff(1.0), (1.0, 0.0, 0.0));
        assert_eq!(cutoff(2.0), (0.0, 0.0, 0.0));
        let (v, d1, d2) = cutoff(1.5);
        assert!((v - 0.5).abs() < 1e-15 && d1 < 0.0 && d2.abs() < 1e-14);
        for i in 1..100 {
            let v = cutoff(1.0 + i as f64 / 100.0).0;
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn derivatives_match_difference_quotients() {
        for kind in [
            PhiKind::Constant,
            PhiKind::ImaginaryPower(1.0),
            PhiKind::DampedImaginary(1.0),
            PhiKind::ImaginaryPower(2.5),
        ] {
            let profile = make_phi(kind).unwrap();
            assert!(profile.derivative_discrepancy(50) < 1e-5, "{kind:?}");
        }
    }

    #[test]
    fn custom_requires_derivatives() {
        let phi: Profile = Arc::new(|t| Complex64::new(t, 0.0));
        let claimed = ClaimedConditions {
            bounded: false,
            condition_d: false,
            condition_p: None,
        };
        let growth = Growth {
            constant: 1.0,
            degree: 1,
        };
        assert!(PhiProfile::custom("t", phi.clone(), None, None, claimed, growth).is_err());
        let profile = PhiProfile::custom(
            "t",
            phi,
            Some(Arc::new(|_| Complex64::new(1.0, 0.0))),
            Some(Arc::new(|_| Complex64::new(0.0, 0.0))),
            claimed,
            growth,
        )
        .unwrap();
        let report = check_bounds(&profile, 400);
        assert!(!report.finite);
        assert!(report.sup_first_extended > 10.0 * report.sup_first);
    }

    #[test]
    fn bounds_reports() {
        let c = check_bounds(&make_phi(PhiKind::Constant).unwrap(), 400);
        assert_eq!((c.sup_first, c.sup_second), (1.0, 0.0));
        assert!(c.finite);
        let ip = check_bounds(&make_phi(PhiKind::ImaginaryPower(1.0)).unwrap(), 400);
        // |Φ| + t|Φ'| = (1 + |τ|) |1/Γ(2 - iτ)|
        assert!((ip.sup_first - 2.0 * 1.355_742_953_213_288_459).abs() < 1e-12);
        assert!(ip.finite);
        assert!(check_bounds(&make_phi(PhiKind::DampedImaginary(1.0)).unwrap(), 400).finite);
    }

    #[test]
    fn condition_d() {
        let c = check_condition_d(&make_phi(PhiKind::Constant).unwrap(), 1e-8).unwrap();
        assert!(c.holds && c.integral_estimate == 0.0);
        let d = check_condition_d(&make_phi(PhiKind::DampedImaginary(1.0)).unwrap(), 1e-8).unwrap();
        assert!(d.holds && d.integral_estimate > 0.0 && d.integral_estimate.is_finite());
        let ip = check_condition_d(&make_phi(PhiKind::ImaginaryPower(1.0)).unwrap(), 1e-8).unwrap();
        assert!(!ip.holds);
        // increments settle to a constant per doubling: logarithmic growth
        let n = ip.increments.len();
        assert!((ip.increments[n - 1].1 - ip.increments[n - 2].1).abs() < 1e-8);
    }

    #[test]
    fn condition_p() {
        assert!(check_condition_p(&make_phi(PhiKind::ImaginaryPower(1.0)).unwrap(), 0).holds);
        let c = check_condition_p(&make_phi(PhiKind::Constant).unwrap(), 0);
        assert!(c.holds && c.fitted_constant == 0.0);
        let exp: Profile = Arc::new(|t| Complex64::new(t.exp(), 0.0));
        let profile = PhiProfile::custom(
            "exp",
            exp.clone(),
            Some(exp.clone()),
            Some(exp),
            ClaimedConditions {
                bounded: false,
                condition_d: false,
                condition_p: None,
            },
            Growth {
                constant: 1.0,
                degree: 0,
            },
        )
        .unwrap();
        for n in [0, 3, 10] {
            assert!(!check_condition_p(&profile, n).holds);
        }
    }

    #[test]
    fn phi_lambda_closed_forms() {
        let c = make_phi(PhiKind::Constant).unwrap();
        assert!((phi_lambda(&c, 3.0, 1e-10).unwrap() - 1.0).norm() < 1e-9);
        assert_eq!(phi_lambda(&c, 0.0, 1e-10).unwrap(), Complex64::new(0.0, 0.0));
        let ip = make_phi(PhiKind::ImaginaryPower(1.0)).unwrap();
        let v = phi_lambda(&ip, 2.0, 1e-10).unwrap();
        let want = Complex64::new(0.769_238_901_363_972_1, 0.638_961_276_313_634_8);
        assert!((v - want).norm() < 1e-9, "{v}");
        assert!(phi_lambda(&c, -1.0, 1e-10).is_err());
    }

    #[test]
    fn multiplier_action() {
        let ctx = GaussianContext::default();
        let f = HermiteExpansion::from_terms(&[(1, 1.0), (3, -0.5)], ctx).unwrap();
        let c = make_phi(PhiKind::Constant).unwrap();
        let g = apply_multiplier(&f, &c, 1e-11).unwrap();
        assert!(g.coefficient_distance(&f) < 1e-9);
        let h0 = HermiteExpansion::basis(0, ctx).unwrap();
        assert_eq!(apply_multiplier(&h0, &c, 1e-10).unwrap().l2_norm(), 0.0);
        let ip = make_phi(PhiKind::ImaginaryPower(1.0)).unwrap();
        let h2 = HermiteExpansion::basis(2, ctx).unwrap();
        let g = apply_multiplier(&h2, &ip, 1e-11).unwrap();
        assert!((g.coefficient(2) - Complex64::new(0.0, 2f64.ln()).exp()).norm() < 1e-9);
        // commutes with the semigroup
        let d = make_phi(PhiKind::DampedImaginary(1.0)).unwrap();
        let a = apply_multiplier(&semigroup(&f, 0.3).unwrap(), &d, 1e-11).unwrap();
        let b = semigroup(&apply_multiplier(&f, &d, 1e-11).unwrap(), 0.3).unwrap();
        assert!(a.coefficient_distance(&b) < 1e-10);
    }
}
