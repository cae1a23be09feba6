//! Geometry of the Gaussian measure on the line: densities, balls, annuli,
//! admissibility functions, the orthonormal Hermite family, and `L^p(γ)` norms.

use crate::error::{Error, Result};
use crate::quadrature::Adaptive;
use crate::real::Real;
use crate::special::{erf, erfc, ln_erf_difference};

/// Dimension, maximal Hermite degree and default tolerance of a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianContext<T> {
    pub dimension: usize,
    pub degree_max: usize,
    pub tol: T,
}

impl<T: Real> Default for GaussianContext<T> {
    fn default() -> Self {
        GaussianContext {
            dimension: 1,
            degree_max: 16,
            tol: T::lit(1e-10),
        }
    }
}

impl<T: Real> GaussianContext<T> {
    pub fn new(dimension: usize, degree_max: usize, tol: T) -> Result<Self> {
        if dimension != 1 {
            return Err(Error::invalid(format!(
                "geometric operations are implemented on the line only (dimension {dimension})"
            )));
        }
        if degree_max < 1 {
            return Err(Error::invalid("degree_max must be at least 1"));
        }
        if !(tol > T::zero()) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(GaussianContext {
            dimension,
            degree_max,
            tol,
        })
    }

    pub fn with_degree_max(mut self, degree_max: usize) -> Result<Self> {
        if degree_max < 1 {
            return Err(Error::invalid("degree_max must be at least 1"));
        }
        self.degree_max = degree_max;
        Ok(self)
    }

    /// Orthonormal Hermite polynomial `h_k(x)`, checked against `degree_max`.
    pub fn hermite(&self, k: usize, x: T) -> Result<T> {
        if k > self.degree_max {
            return Err(Error::DegreeOutOfRange {
                degree: k,
                max: self.degree_max,
            });
        }
        Ok(hermite_orthonormal(k, x))
    }
}

/// `h_k(x) = H_k(x) / sqrt(2^k k!)`, orthonormal in `L^2(γ)`.
///
/// Runs the normalised form of `H_{k+1} = 2x H_k - 2k H_{k-1}`:
/// `h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}`.
pub fn hermite_orthonormal<T: Real>(k: usize, x: T) -> T {
    let mut prev = T::zero();
    let mut cur = T::one();
    for j in 0..k {
        let jf = T::of_usize(j);
        let next = x * (T::lit(2.0) / (jf + T::one())).sqrt() * cur - (jf / (jf + T::one())).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = h_k(x)` for `k < out.len()`.
pub fn hermite_values<T: Real>(x: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    out[0] = T::one();
    if out.len() > 1 {
        out[1] = T::lit(2.0).sqrt() * x;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = T::of_usize(k);
        out[k + 1] = x * (T::lit(2.0) / (kf + T::one())).sqrt() * out[k] - (kf / (kf + T::one())).sqrt() * out[k - 1];
    }
}

/// Density of γ with respect to Lebesgue measure, `pi^{-1/2} e^{-x^2}`.
pub fn gaussian_density<T: Real>(x: T) -> T {
    T::frac_1_sqrt_pi() * (-x * x).exp()
}

/// `γ(B(center, radius)) = (erf(center + radius) - erf(center - radius)) / 2`.
///
/// Evaluated through `erfc` on whichever side keeps both arguments of one sign.
pub fn ball_measure<T: Real>(center: T, radius: T) -> Result<T> {
    if !(radius > T::zero()) {
        return Err(Error::invalid("ball radius must be positive"));
    }
    let (lo, hi) = (center - radius, center + radius);
    let two = T::lit(2.0);
    Ok(if lo >= T::zero() {
        (erfc(lo) - erfc(hi)) / two
    } else if hi <= T::zero() {
        (erfc(-hi) - erfc(-lo)) / two
    } else {
        (erf(hi) - erf(lo)) / two
    })
}

/// Density of γ divided by `γ(B(y, t))`, computed as
/// `1 / ∫_{-t}^{t} e^{-2ys - s^2} ds` so that small balls lose no precision.
pub fn density_over_ball<T: Real>(y: T, t: T) -> T {
    let rule = T::gauss_legendre_16();
    let two = T::lit(2.0);
    // split in two halves to keep the exponential well resolved when |y|t is large
    let mut acc = T::zero();
    for (a, b) in [(-t, T::zero()), (T::zero(), t)] {
        let (h, m) = ((b - a) / two, (a + b) / two);
        for &(x, w) in rule {
            let s = m + h * x;
            acc = acc + w * h * (-two * y * s - s * s).exp();
        }
    }
    acc.recip()
}

/// A symmetric subset of the line on which a function is kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support<T> {
    Whole,
    /// `{ |y| < r }`
    Inside(T),
    /// `{ |y| >= r }`
    Outside(T),
    /// `{ inner <= |y| < outer }`
    Shell {
        inner: T,
        outer: T,
    },
}

impl<T: Real> Support<T> {
    pub fn contains(&self, y: T) -> bool {
        let a = y.abs();
        match *self {
            Support::Whole => true,
            Support::Inside(r) => a < r,
            Support::Outside(r) => a >= r,
            Support::Shell { inner, outer } => a >= inner && a < outer,
        }
    }

    /// Largest finite radius appearing in the description (0 for the whole line).
    pub fn extent(&self) -> T {
        match *self {
            Support::Whole => T::zero(),
            Support::Inside(r) | Support::Outside(r) => r,
            Support::Shell { inner, outer } => {
                if outer.is_finite() {
                    outer
                } else {
                    inner
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        match *self {
            Support::Whole | Support::Outside(_) => false,
            Support::Inside(r) => r.is_finite(),
            Support::Shell { outer, .. } => outer.is_finite(),
        }
    }

    /// Sorted disjoint intervals of `self ∩ [-r, r]`.
    pub fn intervals(&self, r: T) -> Vec<(T, T)> {
        let raw: Vec<(T, T)> = match *self {
            Support::Whole => vec![(-r, r)],
            Support::Inside(rho) => {
                let m = rho.min(r);
                vec![(-m, m)]
            }
            Support::Outside(rho) => {
                if rho <= T::zero() {
                    vec![(-r, r)]
                } else {
                    vec![(-r, -rho), (rho, r)]
                }
            }
            Support::Shell { inner, outer } => {
                let o = outer.min(r);
                if inner <= T::zero() {
                    vec![(-o, o)]
                } else {
                    vec![(-o, -inner), (inner, o)]
                }
            }
        };
        raw.into_iter().filter(|(a, b)| b > a).collect()
    }

    /// Sorted intervals of `self ∩ [lo, hi]`.
    pub fn clip(&self, lo: T, hi: T) -> Vec<(T, T)> {
        let r = lo.abs().max(hi.abs());
        self.intervals(r)
            .into_iter()
            .map(|(a, b)| (a.max(lo), b.min(hi)))
            .filter(|(a, b)| b > a)
            .collect()
    }

    /// γ-measure of the set.
    pub fn measure(&self) -> T {
        match *self {
            Support::Whole => T::one(),
            Support::Inside(r) => {
                if r <= T::zero() {
                    T::zero()
                } else {
                    erf(r)
                }
            }
            Support::Outside(r) => {
                if r <= T::zero() {
                    T::one()
                } else {
                    erfc(r)
                }
            }
            Support::Shell { inner, outer } => {
                if outer <= inner {
                    T::zero()
                } else if inner <= T::zero() {
                    erf(outer)
                } else {
                    erfc(inner) - erfc(outer)
                }
            }
        }
    }

    /// Natural log of the γ-measure, finite even where the measure underflows.
    pub fn log_measure(&self) -> T {
        match *self {
            Support::Shell { inner, outer } if inner > T::zero() && outer > inner => ln_erf_difference(inner, outer),
            Support::Outside(r) if r > T::zero() => crate::special::ln_erfc(r),
            _ => self.measure().ln(),
        }
    }
}

/// Dyadic annuli `C_k` and their enlargements `C_k^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Annulus {
    pub k: u32,
    pub starred: bool,
}

impl Annulus {
    pub fn plain(k: u32) -> Self {
        Annulus { k, starred: false }
    }

    pub fn starred(k: u32) -> Self {
        Annulus { k, starred: true }
    }

    pub fn inner<T: Real>(&self) -> T {
        let two = T::lit(2.0);
        match (self.starred, self.k) {
            (false, 0) => T::zero(),
            (false, k) => two.powi(k as i32 - 1),
            (true, 0) | (true, 1) => T::zero(),
            (true, k) => two.powi(k as i32 - 2),
        }
    }

    pub fn outer<T: Real>(&self) -> T {
        let two = T::lit(2.0);
        match (self.starred, self.k) {
            (false, k) => two.powi(k as i32),
            (true, 0) => two,
            (true, 1) => T::lit(4.0),
            (true, k) => two.powi(k as i32 + 1),
        }
    }

    pub fn support<T: Real>(&self) -> Support<T> {
        Support::Shell {
            inner: self.inner(),
            outer: self.outer(),
        }
    }

    /// Euclidean distance between the two sets.
    pub fn distance<T: Real>(&self, other: &Annulus) -> T {
        let (a0, a1) = (self.inner::<T>(), self.outer::<T>());
        let (b0, b1) = (other.inner::<T>(), other.outer::<T>());
        if b0 >= a1 {
            b0 - a1
        } else if a0 >= b1 {
            a0 - b1
        } else {
            T::zero()
        }
    }
}

pub fn annulus_measure<T: Real>(a: &Annulus) -> T {
    a.support::<T>().measure()
}

pub fn annulus_log_measure<T: Real>(a: &Annulus) -> T {
    a.support::<T>().log_measure()
}

/// `m(x) = min(1, 1/|x|)`.
pub fn admissibility<T: Real>(x: T) -> T {
    let a = x.abs();
    if a <= T::one() {
        T::one()
    } else {
        a.recip()
    }
}

/// Dyadic index `k` with `2^{k-1} <= |x| < 2^k` (0 when `|x| < 1`).
pub fn dyadic_index<T: Real>(x: T) -> u32 {
    let a = x.abs();
    if a < T::one() {
        return 0;
    }
    let mut k = 1u32;
    let mut upper = T::lit(2.0);
    while a >= upper {
        upper = upper * T::lit(2.0);
        k += 1;
    }
    k
}

/// `m̃(x)`: 1 on `|x| < 1`, `2^{-k}` on `2^{k-1} <= |x| < 2^k`.
pub fn discrete_admissibility<T: Real>(x: T) -> T {
    T::lit(2.0).powi(-(dyadic_index(x) as i32))
}

/// Slice `{ y : m̃(y) > t }` of the admissible region at height `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSlice<T> {
    pub t: T,
    /// The slice is `{ |y| < radius }`; zero means empty.
    pub radius: T,
}

impl<T: Real> RegionSlice<T> {
    pub fn contains(&self, y: T) -> bool {
        y.abs() < self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.radius <= T::zero()
    }

    pub fn inside(&self) -> Support<T> {
        Support::Inside(self.radius)
    }

    pub fn outside(&self) -> Support<T> {
        Support::Outside(self.radius)
    }
}

/// `ρ(t) = 2^{k_t}` with `k_t = max { k >= 0 : 2^{-k} > t }`, empty for `t >= 1`.
pub fn region_slice<T: Real>(t: T) -> Result<RegionSlice<T>> {
    if !(t > T::zero()) {
        return Err(Error::invalid("slice height must be positive"));
    }
    if t >= T::one() {
        return Ok(RegionSlice { t, radius: T::zero() });
    }
    let mut k = 0i32;
    let half = T::lit(0.5);
    while half.powi(k + 1) > t {
        k += 1;
    }
    Ok(RegionSlice {
        t,
        radius: T::lit(2.0).powi(k),
    })
}

/// Truncation radius and panel width of the `L^p` machinery.
pub(crate) const LP_INITIAL_RADIUS: f64 = 8.0;
pub(crate) const LP_MAX_DOUBLINGS: u32 = 4;
pub(crate) const LP_PANEL_WIDTH: f64 = 0.25;

fn panel_breaks<T: Real>(a: T, b: T) -> Vec<T> {
    let n = ((b - a) / T::lit(LP_PANEL_WIDTH)).ceil().max(T::one());
    let n = n.to_usize().unwrap_or(1).max(1);
    let h = (b - a) / T::of_usize(n);
    (0..=n)
        .map(|i| if i == n { b } else { a + h * T::of_usize(i) })
        .collect()
}

/// `ln ∫_region exp(log_f(x)) dx`.
///
/// The integrand is shifted by its maximum on a coarse scan before
/// exponentiation, so integrals far below the underflow threshold (or above
/// overflow) remain representable. Unbounded regions start from `[-8, 8]` and
/// add shells `R <= |x| < 2R` until a shell contributes less than `tol`
/// relative to the total; at most four doublings are made.
pub fn log_integral_exp<T, F>(log_f: F, region: &Support<T>, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let r0 = match *region {
        Support::Outside(rho) => rho + T::lit(LP_INITIAL_RADIUS),
        _ => T::lit(LP_INITIAL_RADIUS),
    };
    let r_max = r0 * T::lit(2.0).powi(LP_MAX_DOUBLINGS as i32);
    let bounded = region.is_bounded();
    let scan_r = if bounded {
        match *region {
            Support::Inside(r) => r,
            Support::Shell { outer, .. } => outer,
            _ => r_max,
        }
    } else {
        r_max
    };

    // coarse scan for the shift
    let mut shift = T::neg_infinity();
    let step = T::lit(0.125);
    for (a, b) in region.intervals(scan_r) {
        let n = ((b - a) / step).ceil().to_usize().unwrap_or(1).max(1);
        let h = (b - a) / T::of_usize(n);
        for i in 0..=n {
            let v = log_f(a + h * T::of_usize(i));
            if v > shift {
                shift = v;
            }
        }
    }
    if shift == T::neg_infinity() {
        return Ok(T::neg_infinity());
    }
    if !shift.is_finite() {
        return Err(Error::no_convergence(
            "L^p integral",
            "integrand is not finite on the scan grid",
        ));
    }

    let quad = Adaptive::new(tol).with_max_intervals(20_000);
    let integrate = |pieces: Vec<(T, T)>| -> Result<T> {
        let mut total = T::zero();
        for (a, b) in pieces {
            let breaks = panel_breaks(a, b);
            let est = quad.integrate(|x| (log_f(x) - shift).exp(), &breaks)?;
            total = total + est.value;
        }
        Ok(total)
    };

    if bounded {
        let total = integrate(region.intervals(scan_r))?;
        return Ok(shift + total.ln());
    }

    let mut r = r0;
    let mut total = integrate(region.intervals(r))?;
    for _ in 0..LP_MAX_DOUBLINGS {
        let outer = region.intervals(r * T::lit(2.0));
        let shell: Vec<(T, T)> = outer
            .iter()
            .flat_map(|&(a, b)| {
                let mut v = Vec::new();
                if a < -r {
                    v.push((a, b.min(-r)));
                }
                if b > r {
                    v.push((a.max(r), b));
                }
                v
            })
            .filter(|(a, b)| b > a)
            .collect();
        let extra = integrate(shell)?;
        total = total + extra;
        r = r * T::lit(2.0);
        if extra <= tol * total {
            return Ok(shift + total.ln());
        }
    }
    Err(Error::no_convergence(
        "L^p integral",
        format!("tail beyond |x| = {} still above tolerance", r.as_f64()),
    ))
}

/// `ln ‖f 1_region‖_{L^p(γ)}` from `log_abs_f(x) = ln |f(x)|`.
pub fn log_lp_norm_on<T, F>(log_abs_f: F, p: T, region: &Support<T>, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(p >= T::one()) {
        return Err(Error::invalid("L^p exponent must be at least 1"));
    }
    let half_ln_pi = T::PI().ln() / T::lit(2.0);
    let li = log_integral_exp(|x| p * log_abs_f(x) - x * x - half_ln_pi, region, tol)?;
    Ok(li / p)
}

/// `‖f 1_region‖_{L^p(γ)}` where `abs_f(x) = |f(x)|`.
pub fn lp_norm_on<T, F>(abs_f: F, p: T, region: &Support<T>, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    log_lp_norm_on(|x| abs_f(x).ln(), p, region, tol).map(|l| l.exp())
}

/// `‖f‖_{L^p(γ)}` over the whole line.
pub fn lp_norm<T, F>(abs_f: F, p: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    lp_norm_on(abs_f, p, &Support::Whole, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gamma_quadrature;

    #[test]
    fn density_values() {
        assert!((gaussian_density(0.0f64) - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!((gaussian_density(1.0f64) - 0.207_553_748_710_297_35).abs() < 1e-15);
        assert_eq!(gaussian_density(1e3f64), 0.0);
    }

    #[test]
    fn ball_values() {
        assert!((ball_measure(0.0f64, 1.0).unwrap() - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((ball_measure(2.0f64, 0.5).unwrap() - 0.016_743_950_753_622_157).abs() < 1e-15);
        assert!((ball_measure(0.0f64, 1e3).unwrap() - 1.0).abs() < 1e-15);
        assert!(ball_measure(0.0f64, 0.0).is_err());
        assert!(ball_measure(0.0f64, -1.0).is_err());
        // symmetric in the centre
        let a = ball_measure(-2.0f64, 0.5).unwrap();
        assert!((a - 0.016_743_950_753_622_157).abs() < 1e-15);
    }

    #[test]
    fn density_over_ball_matches_erf_form() {
        for &(y, t) in &[(0.0f64, 0.5), (1.5, 0.3), (-3.0, 0.2), (0.2, 1e-4)] {
            let direct = gaussian_density(y) / ball_measure(y, t).unwrap();
            let stable = density_over_ball(y, t);
            assert!(((direct - stable) / stable).abs() < 1e-9, "{y} {t}");
        }
    }

    #[test]
    fn annulus_geometry() {
        assert_eq!(Annulus::plain(0).inner::<f64>(), 0.0);
        assert_eq!(Annulus::plain(3).inner::<f64>(), 4.0);
        assert_eq!(Annulus::plain(3).outer::<f64>(), 8.0);
        assert_eq!(Annulus::starred(0).outer::<f64>(), 2.0);
        assert_eq!(Annulus::starred(1).outer::<f64>(), 4.0);
        assert_eq!(Annulus::starred(4).inner::<f64>(), 4.0);
        assert_eq!(Annulus::starred(4).outer::<f64>(), 32.0);
        for k in 0..10 {
            let (c, s) = (Annulus::plain(k), Annulus::starred(k));
            assert!(s.inner::<f64>() <= c.inner::<f64>() && c.outer::<f64>() <= s.outer::<f64>());
        }
        assert_eq!(Annulus::plain(2).distance::<f64>(&Annulus::plain(3)), 0.0);
        assert_eq!(Annulus::plain(2).distance::<f64>(&Annulus::plain(4)), 4.0);
    }

    #[test]
    fn annulus_measures() {
        let c0: f64 = annulus_measure(&Annulus::plain(0));
        let c1: f64 = annulus_measure(&Annulus::plain(1));
        assert!((c0 - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((c1 - 0.152_621_472_069_237_86).abs() < 1e-15);
        // 40-digit references for ln γ(C_k)
        let refs = [
            (2, -5.364_944_560_503_080_4),
            (3, -17.987_778_312_103_007),
            (4, -66.659_471_970_805_16),
            (5, -259.346_897_344_050_3),
            (6, -1_028.038_588_532_358_8),
        ];
        for (k, want) in refs {
            let got: f64 = annulus_log_measure(&Annulus::plain(k));
            assert!(((got - want) / want).abs() < 1e-13, "k = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn annulus_tail_decay_rate() {
        // least-squares slope of ln γ(C_k) against 4^k over k = 2..6
        let pts: Vec<(f64, f64)> = (2..=6)
            .map(|k| (4f64.powi(k as i32), annulus_log_measure::<f64>(&Annulus::plain(k))))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let c = -slope;
        assert!(c > 0.0);
        let intercept = my + c * mx;
        // with the fitted rate the bound holds up to the intercept slack
        let worst = pts.iter().map(|p| p.1 + c * p.0).fold(f64::MIN, f64::max);
        assert!(worst - intercept < 2.0);
    }

    #[test]
    fn ball_additivity_over_annuli() {
        for k in 0..8u32 {
            let ball = ball_measure(0.0f64, 2f64.powi(k as i32)).unwrap();
            let sum: f64 = (0..=k).map(|j| annulus_measure::<f64>(&Annulus::plain(j))).sum();
            assert!((ball - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn admissibility_values() {
        assert_eq!(admissibility(0.0f64), 1.0);
        assert_eq!(admissibility(2.0f64), 0.5);
        assert_eq!(admissibility(0.5f64), 1.0);
        assert_eq!(discrete_admissibility(0.5f64), 1.0);
        assert_eq!(discrete_admissibility(3.0f64), 0.25);
        assert_eq!(discrete_admissibility(1.0f64), 0.5);
        assert_eq!(discrete_admissibility(-2.0f64), 0.25);
        assert_eq!(discrete_admissibility(1.999_999f64), 0.5);
    }

    #[test]
    fn slices() {
        assert_eq!(region_slice(0.3f64).unwrap().radius, 2.0);
        assert!(region_slice(1.0f64).unwrap().is_empty());
        assert!(region_slice(5.0f64).unwrap().is_empty());
        assert_eq!(region_slice(0.05f64).unwrap().radius, 16.0);
        assert_eq!(region_slice(0.25f64).unwrap().radius, 2.0);
        assert_eq!(region_slice(0.9f64).unwrap().radius, 1.0);
        assert!(region_slice(0.0f64).is_err());
        // slice agrees with m̃ on both sides of the boundary
        for &t in &[0.3f64, 0.05, 0.7, 0.011] {
            let s = region_slice(t).unwrap();
            for &y in &[0.0, 0.4, 0.99, 1.0, 1.5, 2.5, 3.9, 4.0, 7.0, 15.9, 16.0, 40.0] {
                assert_eq!(s.contains(y), discrete_admissibility(y) > t, "t={t} y={y}");
            }
        }
    }

    #[test]
    fn hermite_values_and_orthonormality() {
        assert_eq!(hermite_orthonormal(0, 3.7f64), 1.0);
        assert!((hermite_orthonormal(2, 2.0f64) - 14.0 / 8f64.sqrt()).abs() < 1e-14);
        let ctx = GaussianContext::<f64>::default();
        assert!(ctx.hermite(17, 0.0).is_err());
        let rule = gamma_quadrature::<f64>(12).unwrap();
        for j in 0..=8 {
            for k in 0..=8 {
                let g = rule.sum(|x| hermite_orthonormal(j, x) * hermite_orthonormal(k, x));
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({j},{k}) -> {g}");
            }
        }
        let mut buf = [0.0f64; 9];
        hermite_values(1.3, &mut buf);
        for (k, v) in buf.iter().enumerate() {
            assert!((v - hermite_orthonormal(k, 1.3)).abs() < 1e-13);
        }
    }

    #[test]
    fn hermite_orthonormality_single_precision() {
        let rule = gamma_quadrature::<f32>(10).unwrap();
        for j in 0..=5 {
            let g = rule.sum(|x| hermite_orthonormal(j, x) * hermite_orthonormal(j, x));
            assert!((g - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn lp_norm_values() {
        assert!((lp_norm(|_| 1.0f64, 1.7, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let h1 = |x: f64| (2f64.sqrt() * x).abs();
        assert!((lp_norm(h1, 2.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!((lp_norm(h1, 1.0, 1e-12).unwrap() - 0.797_884_560_802_865_4).abs() < 1e-12);
        assert!(lp_norm(h1, 0.5, 1e-12).is_err());
    }

    #[test]
    fn lp_norm_large_exponent_far_mass() {
        // ‖x^2‖_q = (Γ(q+1/2)/sqrt(π))^{1/q} in closed form; q = 60 puts the mass near |x| ≈ 11
        let q = 60.0f64;
        let got = lp_norm(|x: f64| x * x, q, 1e-12).unwrap();
        let want = ((ln_gamma(q + 0.5) - 0.5 * std::f64::consts::PI.ln()) / q).exp();
        assert!(((got - want) / want).abs() < 1e-10, "{got} {want}");
    }

    fn ln_gamma(x: f64) -> f64 {
        crate::special::gamma_complex(num_complex::Complex64::new(x, 0.0))
            .norm()
            .ln()
    }

    #[test]
    fn restricted_norm_in_log_domain() {
        // ‖1_{C_6}‖_p = γ(C_6)^{1/p}, far below the smallest f64
        let c6 = Annulus::plain(6).support::<f64>();
        let l = log_lp_norm_on(|_| 0.0, 2.0, &c6, 1e-12).unwrap();
        let want = -1_028.038_588_532_358_8 / 2.0;
        assert!(((l - want) / want).abs() < 1e-11, "{l}");
    }
}
