//! Admissible cones, the conical square function and Gaussian tent norms.
//!
//! Everything here lives on the line. The admissible region is
//! `D = {(y, t) : 0 < t < m̃(y)}`; its slice at height `t` is `{|y| < ρ(t)}`,
//! and the cone with vertex `x` and aperture `a` is
//! `Γ(x) = {(y, t) ∈ D : |y - x| < a t}`.
//!
//! All `dt/t` integrals run in `σ = ln t` and stop `2^-18` below their upper
//! limit: every integrand here is `O(t^4)` at `t → 0`, so the omitted part is
//! below `2^-72` relative.

use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::UField;
use crate::error::{Error, Result};
use crate::gaussian::{admissibility, density_over_ball, region_slice, Support};
use crate::quadrature::Adaptive;
use crate::real::Real;
use crate::spectral::{t2l_semigroup, HermiteExpansion};

const OCTAVES: i32 = 18;
/// Widest Gauss–Legendre panel used for the spatial integrals.
const Y_PANEL: f64 = 0.5;

/// An admissible cone `Γ(x) = {(y, t) ∈ D : |y - x| < aperture·t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cone {
    pub vertex: f64,
    pub aperture: f64,
}

impl Cone {
    pub fn new(vertex: f64) -> Self {
        Cone { vertex, aperture: 1.0 }
    }

    pub fn with_aperture(mut self, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture.is_finite()) {
            return Err(Error::invalid("cone aperture must be positive"));
        }
        self.aperture = aperture;
        Ok(self)
    }

    /// The slice of the cone at height `t`, as an interval (possibly empty).
    pub fn slice(&self, t: f64) -> Result<Option<(f64, f64)>> {
        let rho = region_slice(t)?.radius;
        let lo = (self.vertex - self.aperture * t).max(-rho);
        let hi = (self.vertex + self.aperture * t).min(rho);
        Ok((hi > lo).then_some((lo, hi)))
    }
}

/// Composite 16-point Gauss–Legendre rule over `[a, b]` in panels of at most
/// [`Y_PANEL`].
fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let n = ((b - a) / Y_PANEL).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let (lo, hi) = (a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 });
        let (half, mid) = ((hi - lo) / 2.0, (hi + lo) / 2.0);
        for &(x, w) in f64::gauss_legendre_16() {
            acc += w * half * f(mid + half * x);
        }
    }
    acc
}

/// `∫_{lower}^{upper} F(t) dt/t` in `σ = ln t`, positive integrand.
fn log_time_integral<F>(
    lower: f64,
    upper: f64,
    extra_breaks: &[f64],
    tol: f64,
    what: &'static str,
    mut inner: F,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut breaks: Vec<f64> = vec![lower.ln(), upper.ln()];
    breaks.extend(extra_breaks.iter().filter(|&&t| t > lower && t < upper).map(|t| t.ln()));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut failure: Option<Error> = None;
    let est = Adaptive::new(tol)
        .with_max_intervals(4000)
        .integrate(
            |s: f64| {
                if failure.is_some() {
                    return 0.0;
                }
                inner(s.exp()).unwrap_or_else(|e| {
                    failure = Some(e);
                    0.0
                })
            },
            &breaks,
        )
        .map_err(|e| match e {
            Error::NonConvergence { detail, .. } => Error::NonConvergence {
                what,
                detail: format!("dt/t integral: {detail}"),
            },
            other => other,
        })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// `Sf(x)`: the conical square function with upper limit `2 m(x)`,
///
/// `Sf(x)^2 = ∫_0^{2m(x)} γ(B(x,t))^{-1} ∫_{B(x,t)} |t^2 L e^{-t^2 L} f|^2 dγ dt/t`.
///
/// The ball average is taken in `y = x + s` with weight `e^{-2xs - s^2}`, so the
/// Gaussian factor `e^{-x^2}` cancels exactly between numerator and denominator.
pub fn square_function(f: &HermiteExpansion<f64>, x: f64, tol: f64) -> Result<f64> {
    if f.degree() == 0 || f.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    let upper = 2.0 * admissibility(x);
    let lower = upper * 2f64.powi(-OCTAVES);
    let octaves: Vec<f64> = (1..OCTAVES).map(|k| upper * 2f64.powi(-k)).collect();
    let total = log_time_integral(lower, upper, &octaves, tol, "square function", |t| {
        let g = t2l_semigroup(f, t, 1.0)?;
        let weight = |s: f64| (-2.0 * x * s - s * s).exp();
        let num = composite(-t, t, |s| weight(s) * g.eval(x + s).norm_sqr());
        let den = composite(-t, t, weight);
        Ok(num / den)
    })?;
    Ok(total.max(0.0).sqrt())
}

/// Times at which the geometry of a cone slice changes: the dyadic heights
/// `height·2^-k` (where the region slice jumps) and, inside each band, the
/// heights at which a cone edge crosses the slice boundary.
fn cone_breaks(vertex: f64, aperture: f64, height: f64, lower: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let top = height * 2f64.powi(-k);
        let bottom = top / 2.0;
        if top <= lower {
            break;
        }
        out.push(top);
        let rho = 2f64.powi(k);
        for c in [rho - vertex.abs(), vertex.abs() - rho, vertex.abs() + rho] {
            let t = c / aperture;
            if t > bottom && t < top {
                out.push(t);
            }
        }
        k += 1;
    }
    out
}

/// `∬ |g_t(y)|^2 dγ(y) dt / (t γ(B(y,t)))` over the cone with vertex
/// `vertex` in the region `{t < height·m̃(y)}`, where `slice(t)` is `g_t`.
fn cone_energy<G>(slice: G, vertex: f64, aperture: f64, height: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<HermiteExpansion<f64>>,
{
    let lower = height * 2f64.powi(-OCTAVES);
    let breaks = cone_breaks(vertex, aperture, height, lower);
    log_time_integral(lower, height, &breaks, tol, "cone integral", |t| {
        let rho = region_slice(t / height)?.radius;
        let lo = (vertex - aperture * t).max(-rho);
        let hi = (vertex + aperture * t).min(rho);
        if !(hi > lo) {
            return Ok(0.0);
        }
        let g = slice(t)?;
        Ok(composite(lo, hi, |y| g.eval(y).norm_sqr() * density_over_ball(y, t)))
    })
}

/// `∬_{Γ(x)} |u(y,t)|^2 dγ(y) dt / (t γ(B(y,t)))` — the inner integral of the
/// tent norm. The weight's ball is centred at `y`, not at the vertex.
pub fn cone_integral(u: &UField, cone: &Cone, tol: f64) -> Result<f64> {
    if u.f.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    cone_energy(|t| u.slice_polynomial(t), cone.vertex, cone.aperture, 1.0, tol)
}

/// Kinks of `x ↦ cone_integral(Γ(x))`: where a cone corner meets a jump of the
/// region slice.
fn vertex_breaks(aperture: f64, radius: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut k = 0;
    while 2f64.powi(k) < radius + 1.0 {
        let rho = 2f64.powi(k);
        for t in [2f64.powi(-k), 2f64.powi(-k - 1)] {
            for c in [rho + aperture * t, rho - aperture * t] {
                if c.abs() < radius {
                    out.push(c);
                    out.push(-c);
                }
            }
        }
        k += 1;
    }
    out
}

/// Gauss–Legendre panels over `[a, b]` at most `width` wide, also broken at
/// `kinks`.
fn panel_nodes(a: f64, b: f64, width: f64, kinks: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|&c| c > a && c < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        for i in 0..n {
            let (pa, pb) = (lo + h * i as f64, if i + 1 == n { hi } else { lo + h * (i + 1) as f64 });
            let (half, mid) = ((pb - pa) / 2.0, (pa + pb) / 2.0);
            for &(x, wt) in f64::gauss_legendre_16() {
                nodes.push((mid + half * x, wt * half));
            }
        }
    }
    nodes
}

/// Initial truncation radius, initial panel width and refinement limits of
/// [`tent_norm`]'s outer integral.
const TENT_RADIUS: f64 = 8.0;
const TENT_PANEL: f64 = 0.5;
const TENT_REFINEMENTS: u32 = 4;

/// `‖u‖_{t^p(γ)} = ( ∫ cone_integral(u, Γ(x))^{p/2} dγ(x) )^{1/p}`, `1 <= p <= 2`.
///
/// The outer integral is composite Gauss–Legendre over `[-R, R]` (panels broken
/// at the kinks of the cone geometry), with the panel count doubled until two
/// successive estimates agree to `tol`, then `R` doubled until the added shell
/// is below `tol`. Cone integrals use `tol / 10`. Cone evaluations on a grid
/// run in parallel and are summed in grid order.
pub fn tent_norm(u: &UField, p: f64, tol: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::invalid("tent norms are computed for 1 <= p <= 2"));
    }
    if u.f.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    let inner_tol = tol / 10.0;
    let integrate = |nodes: &[(f64, f64)]| -> Result<f64> {
        let values: Vec<Result<f64>> = nodes
            .par_iter()
            .map(|&(x, w)| {
                let c = cone_integral(u, &Cone::new(x), inner_tol)?;
                Ok(w * c.max(0.0).powf(p / 2.0) * crate::gaussian::gaussian_density(x))
            })
            .collect();
        values.into_iter().sum()
    };
    let side = |a: f64, b: f64, width: f64, kinks: &[f64]| -> Vec<(f64, f64)> {
        let mut nodes = panel_nodes(-b, -a, width, kinks);
        nodes.extend(panel_nodes(a, b, width, kinks));
        nodes
    };

    let mut radius = TENT_RADIUS;
    let kinks = vertex_breaks(1.0, 16.0 * TENT_RADIUS);
    let mut width = TENT_PANEL;
    let mut core = integrate(&panel_nodes(-radius, radius, width, &kinks))?;
    let mut converged = false;
    for _ in 0..TENT_REFINEMENTS {
        width /= 2.0;
        let finer = integrate(&panel_nodes(-radius, radius, width, &kinks))?;
        let change = (finer - core).abs();
        core = finer;
        if change <= tol * finer.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::no_convergence(
            "tent norm",
            format!("outer x-integral not stable to {tol:e} after {TENT_REFINEMENTS} panel doublings"),
        ));
    }
    for _ in 0..TENT_REFINEMENTS {
        let shell = integrate(&side(radius, 2.0 * radius, 4.0 * TENT_PANEL, &kinks))?;
        core += shell;
        radius *= 2.0;
        if shell <= tol * core {
            return Ok(core.powf(1.0 / p));
        }
    }
    Err(Error::no_convergence(
        "tent norm",
        format!("tail beyond |x| = {radius} still above tolerance"),
    ))
}

/// `∬_D |u(y,t)|^2 dγ(y) dt/t`, computed directly over the region (no cones).
///
/// By Fubini, `∫ 1_{|x-y|<t} dγ(x) = γ(B(y,t))` cancels the cone weight, so
/// this equals `‖u‖_{t^2(γ)}^2`. Each slice integral is Parseval's `‖g_t‖_2^2`
/// minus the Gaussian tail `‖1_{|y| >= ρ(t)} g_t‖_2^2`.
pub fn region_energy(u: &UField, tol: f64) -> Result<f64> {
    if u.f.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    let lower = 2f64.powi(-OCTAVES);
    let octaves: Vec<f64> = (1..OCTAVES).map(|k| 2f64.powi(-k)).collect();
    log_time_integral(lower, 1.0, &octaves, tol, "region energy", |t| {
        let g = u.slice_polynomial(t)?;
        let rho = region_slice(t)?.radius;
        let total = g.l2_norm().powi(2);
        if rho >= NEGLIGIBLE_TAIL_RADIUS {
            return Ok(total);
        }
        let tail = g.lp_norm_on(2.0, &Support::Outside(rho), tol / 10.0)?;
        Ok((total - tail * tail).max(0.0))
    })
}

/// Beyond this radius the Gaussian tail of a degree-16 polynomial is below
/// `e^{-900}·30^{32}` relative and is dropped.
const NEGLIGIBLE_TAIL_RADIUS: f64 = 30.0;

/// Both sides of the change-of-aperture comparison at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApertureComparison {
    pub x: f64,
    pub delta: f64,
    /// `∬_{Γ(x) ∩ D'} |s^2 L e^{-s^2 L} f(y)|^2 dγ(y) ds / (s γ(B(y,s)))`
    /// with `D' = {s < √δ m̃(y)}`.
    pub restricted_cone: f64,
    /// `Sf(x)^2`.
    pub square_function_sq: f64,
    /// `restricted_cone / square_function_sq`, defined as 0 when both vanish.
    pub ratio: f64,
}

/// The pointwise inequality behind the change of aperture: the cone integral
/// over the shrunken region `D'` against `Sf(x)^2`. The implied constant is
/// reported, not asserted.
pub fn aperture_compare(f: &HermiteExpansion<f64>, delta: f64, x: f64, tol: f64) -> Result<ApertureComparison> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid("aperture comparison needs 0 < delta <= 1"));
    }
    let (left, right) = if f.degree() == 0 || f.l2_norm() == 0.0 {
        (0.0, 0.0)
    } else {
        let left = cone_energy(|s| t2l_semigroup(f, s, 1.0), x, 1.0, delta.sqrt(), tol)?;
        let right = square_function(f, x, tol)?.powi(2);
        (left, right)
    };
    let ratio = if left == 0.0 && right == 0.0 {
        0.0
    } else if right == 0.0 {
        f64::INFINITY
    } else {
        left / right
    };
    Ok(ApertureComparison {
        x,
        delta,
        restricted_cone: left,
        square_function_sq: right,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::build_u;
    use crate::gaussian::GaussianContext;

    fn h(k: usize) -> HermiteExpansion<f64> {
        HermiteExpansion::basis(k, GaussianContext::default()).unwrap()
    }

    #[test]
    fn cone_slice_geometry() {
        let c = Cone::new(1.5);
        // t = 0.3: rho = 2, slice [1.2, 1.8]
        let (lo, hi) = c.slice(0.3).unwrap().unwrap();
        assert!((lo - 1.2).abs() < 1e-15 && (hi - 1.8).abs() < 1e-15);
        // t = 0.6: rho = 1, slice [0.9, 1)
        let (lo, hi) = c.slice(0.6).unwrap().unwrap();
        assert!((lo - 0.9).abs() < 1e-15 && hi == 1.0);
        assert!(Cone::new(5.0).slice(0.6).unwrap().is_none());
        assert!(Cone::new(0.0).with_aperture(0.0).is_err());
    }

    #[test]
    fn trivial_inputs_vanish() {
        assert_eq!(square_function(&h(0), 0.3, 1e-8).unwrap(), 0.0);
        let zero = HermiteExpansion::zero(GaussianContext::default());
        assert_eq!(square_function(&zero, 0.3, 1e-8).unwrap(), 0.0);
        let u = build_u(&zero, 1.0 / 128.0).unwrap();
        assert_eq!(cone_integral(&u, &Cone::new(0.0), 1e-8).unwrap(), 0.0);
        assert_eq!(tent_norm(&u, 2.0, 1e-6).unwrap(), 0.0);
        let r = aperture_compare(&h(0), 1.0, 0.0, 1e-8).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn square_function_of_h1_at_origin() {
        // oracle: mpmath, S(h_1)(0)^2 = ∫_0^2 2 t^3 e^{-2t^2} <y^2>_{B(0,t)} dt
        let s = square_function(&h(1), 0.0, 1e-10).unwrap();
        assert!((s - 0.237_847_124_381_999_2).abs() < 1e-9, "{s}");
    }

    #[test]
    fn aperture_monotone() {
        let u = build_u(&h(1), 1.0 / 128.0).unwrap();
        let a1 = cone_integral(&u, &Cone::new(0.3), 1e-9).unwrap();
        let a2 = cone_integral(&u, &Cone::new(0.3).with_aperture(2.0).unwrap(), 1e-9).unwrap();
        assert!(a1 > 0.0 && a2 >= a1);
    }
}
