//! Exact functional calculus of the Ornstein-Uhlenbeck operator on finite
//! Hermite expansions: symbols, the semigroup, `t^2 L e^{-s t^2 L}`, the
//! projection onto constants and the local maximal function.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian::{admissibility, hermite_values, log_lp_norm_on, GaussianContext, Support};
use crate::real::Real;

/// A polynomial `f = Σ c_k h_k` in the orthonormal Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion<T> {
    coefficients: Vec<Complex<T>>,
    context: GaussianContext<T>,
}

impl<T: Real> HermiteExpansion<T> {
    pub fn new(coefficients: Vec<Complex<T>>, context: GaussianContext<T>) -> Result<Self> {
        if coefficients.len() > context.degree_max + 1 {
            return Err(Error::DegreeOutOfRange {
                degree: coefficients.len() - 1,
                max: context.degree_max,
            });
        }
        let mut coefficients = coefficients;
        if coefficients.is_empty() {
            coefficients.push(Complex::new(T::zero(), T::zero()));
        }
        Ok(HermiteExpansion { coefficients, context })
    }

    /// Expansion with real coefficients.
    pub fn from_real(coefficients: &[T], context: GaussianContext<T>) -> Result<Self> {
        Self::new(
            coefficients.iter().map(|&c| Complex::new(c, T::zero())).collect(),
            context,
        )
    }

    /// The basis polynomial `h_k`.
    pub fn basis(k: usize, context: GaussianContext<T>) -> Result<Self> {
        let mut c = vec![Complex::new(T::zero(), T::zero()); k + 1];
        c[k] = Complex::new(T::one(), T::zero());
        Self::new(c, context)
    }

    /// `Σ weight_j h_{k_j}` from `(k, weight)` pairs.
    pub fn from_terms(terms: &[(usize, T)], context: GaussianContext<T>) -> Result<Self> {
        let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut c = vec![Complex::new(T::zero(), T::zero()); top + 1];
        for &(k, w) in terms {
            c[k] = c[k] + Complex::new(w, T::zero());
        }
        Self::new(c, context)
    }

    pub fn zero(context: GaussianContext<T>) -> Self {
        HermiteExpansion {
            coefficients: vec![Complex::new(T::zero(), T::zero())],
            context,
        }
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Complex<T> {
        self.coefficients
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn context(&self) -> &GaussianContext<T> {
        &self.context
    }

    /// Index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Σ c_k h_k(x)` through the three-term recurrence.
    pub fn eval(&self, x: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut prev = T::zero();
        let mut cur = T::one();
        let two = T::lit(2.0);
        for (k, &c) in self.coefficients.iter().enumerate() {
            acc = acc + c * cur;
            let kf = T::of_usize(k);
            let next = x * (two / (kf + T::one())).sqrt() * cur - (kf / (kf + T::one())).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        acc
    }

    /// `Σ_k ψ_k c_k h_k(x)` without building the intermediate expansion.
    pub fn eval_weighted<F: Fn(usize) -> T>(&self, x: T, weight: F) -> Complex<T> {
        let mut h = vec![T::zero(); self.coefficients.len()];
        hermite_values(x, &mut h);
        self.coefficients
            .iter()
            .zip(&h)
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, (&c, &hk))| {
                acc + c * (weight(k) * hk)
            })
    }

    /// `Σ_k w_k c_k h_k(x)` for complex weights.
    pub fn eval_weighted_complex<F: Fn(usize) -> Complex<T>>(&self, x: T, weight: F) -> Complex<T> {
        let mut h = vec![T::zero(); self.coefficients.len()];
        hermite_values(x, &mut h);
        self.coefficients
            .iter()
            .zip(&h)
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, (&c, &hk))| {
                acc + weight(k) * c * hk
            })
    }

    /// `∫ f dγ = c_0`.
    pub fn mean(&self) -> Complex<T> {
        self.coefficients[0]
    }

    pub fn is_zero_mean(&self) -> bool {
        self.coefficients[0].norm() == T::zero()
    }

    /// `‖f‖_2` by Parseval.
    pub fn l2_norm(&self) -> T {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// `ln ‖f 1_region‖_p` by quadrature.
    pub fn log_lp_norm_on(&self, p: T, region: &Support<T>, tol: T) -> Result<T> {
        log_lp_norm_on(|x| self.eval(x).norm().ln(), p, region, tol)
    }

    /// `‖f‖_p` by quadrature.
    pub fn lp_norm(&self, p: T, tol: T) -> Result<T> {
        self.log_lp_norm_on(p, &Support::Whole, tol).map(|l| l.exp())
    }

    /// `‖f 1_region‖_p` by quadrature.
    pub fn lp_norm_on(&self, p: T, region: &Support<T>, tol: T) -> Result<T> {
        self.log_lp_norm_on(p, region, tol).map(|l| l.exp())
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        HermiteExpansion {
            coefficients: self.coefficients.iter().map(|&c| c * factor).collect(),
            context: self.context,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        HermiteExpansion {
            coefficients: (0..n).map(|k| self.coefficient(k) + other.coefficient(k)).collect(),
            context: self.context,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    /// Copy with `c_0 = 0`.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coefficients[0] = Complex::new(T::zero(), T::zero());
        out
    }

    /// Largest coefficient-wise distance, `max_k |a_k - b_k|`.
    pub fn coefficient_distance(&self, other: &Self) -> T {
        let n = self.coefficients.len().max(other.coefficients.len());
        (0..n)
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(T::zero(), T::max)
    }
}

/// A function `k ↦ ψ(k)` on the spectrum, acting by `h_k ↦ ψ(k) h_k`.
#[derive(Clone)]
pub struct SpectralSymbol<T> {
    map: Arc<dyn Fn(usize) -> Complex<T> + Send + Sync>,
    pub label: String,
}

impl<T> fmt::Debug for SpectralSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralSymbol").field("label", &self.label).finish()
    }
}

impl<T: Real> SpectralSymbol<T> {
    pub fn new<F>(label: impl Into<String>, map: F) -> Self
    where
        F: Fn(usize) -> Complex<T> + Send + Sync + 'static,
    {
        SpectralSymbol {
            map: Arc::new(map),
            label: label.into(),
        }
    }

    /// Real-valued symbol.
    pub fn real<F>(label: impl Into<String>, map: F) -> Self
    where
        F: Fn(usize) -> T + Send + Sync + 'static,
    {
        Self::new(label, move |k| Complex::new(map(k), T::zero()))
    }

    pub fn eval(&self, k: usize) -> Complex<T> {
        (self.map)(k)
    }

    pub fn identity() -> Self {
        Self::real("identity", |_| T::one())
    }

    /// `e^{-tk}`.
    pub fn heat(t: T) -> Self {
        Self::real(format!("exp(-{t} k)"), move |k| (-t * T::of_usize(k)).exp())
    }

    /// `tk e^{-tk}`.
    pub fn t_l_heat(t: T) -> Self {
        Self::real(format!("{t} k exp(-{t} k)"), move |k| {
            let tk = t * T::of_usize(k);
            tk * (-tk).exp()
        })
    }

    /// `t^2 k e^{-s t^2 k}`.
    pub fn t2l_heat(t: T, s: T) -> Self {
        Self::real(format!("t2L exp(-s t2 L), t={t}, s={s}"), move |k| {
            let a = t * t * T::of_usize(k);
            a * (-s * a).exp()
        })
    }

    /// Projection onto constants, `E_0`.
    pub fn mean_projection() -> Self {
        Self::real("E0", |k| if k == 0 { T::one() } else { T::zero() })
    }

    /// `I - E_0`.
    pub fn mean_free_projection() -> Self {
        Self::real("I-E0", |k| if k == 0 { T::zero() } else { T::one() })
    }

    /// Symbol of the composition: pointwise product.
    pub fn then(&self, other: &Self) -> Self {
        let (a, b) = (self.map.clone(), other.map.clone());
        SpectralSymbol {
            map: Arc::new(move |k| a(k) * b(k)),
            label: format!("({}) * ({})", self.label, other.label),
        }
    }
}

/// `c_k ↦ ψ(k) c_k`.
pub fn apply_symbol<T: Real>(f: &HermiteExpansion<T>, psi: &SpectralSymbol<T>) -> HermiteExpansion<T> {
    HermiteExpansion {
        coefficients: f
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| psi.eval(k) * c)
            .collect(),
        context: f.context,
    }
}

/// `e^{-tL} f`.
pub fn semigroup<T: Real>(f: &HermiteExpansion<T>, t: T) -> Result<HermiteExpansion<T>> {
    if !(t >= T::zero()) {
        return Err(Error::invalid("semigroup time must be non-negative"));
    }
    Ok(apply_symbol(f, &SpectralSymbol::heat(t)))
}

/// `t^2 L e^{-s t^2 L} f`.
pub fn t2l_semigroup<T: Real>(f: &HermiteExpansion<T>, t: T, s: T) -> Result<HermiteExpansion<T>> {
    if !(t > T::zero() && s > T::zero()) {
        return Err(Error::invalid("scale and damping must be positive"));
    }
    Ok(apply_symbol(f, &SpectralSymbol::t2l_heat(t, s)))
}

/// Default lower-end factor of the maximal-function window, `ε = 1/64`.
pub const DEFAULT_MAXIMAL_EPSILON: f64 = 1.0 / 64.0;

const MAXIMAL_GRID: usize = 256;

/// `sup_{lo < t <= hi} |e^{-tL} f(x)|` by a log-uniform grid followed by
/// golden-section refinement around the best cell.
pub fn semigroup_sup<T: Real>(f: &HermiteExpansion<T>, x: T, lo: T, hi: T) -> Result<T> {
    if !(lo > T::zero() && hi >= lo) {
        return Err(Error::invalid("time window must satisfy 0 < lo <= hi"));
    }
    let mut h = vec![T::zero(); f.coefficients.len()];
    hermite_values(x, &mut h);
    let value = |t: T| -> T {
        f.coefficients
            .iter()
            .zip(&h)
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, (&c, &hk))| {
                acc + c * ((-t * T::of_usize(k)).exp() * hk)
            })
            .norm()
    };
    let (llo, lhi) = (lo.ln(), hi.ln());
    let n = MAXIMAL_GRID;
    let grid: Vec<T> = (0..n)
        .map(|i| (llo + (lhi - llo) * T::of_usize(i) / T::of_usize(n - 1)).exp())
        .collect();
    let (mut best_i, mut best) = (0usize, T::neg_infinity());
    for (i, &t) in grid.iter().enumerate() {
        let v = value(t);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // golden-section search for a maximum inside the neighbouring cells
    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(n - 1)];
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (value(c), value(d));
    let t_tol = T::lit(1e-10).max(T::epsilon() * T::lit(16.0) * hi);
    let mut iters = 0;
    while (b - a).abs() > t_tol && iters < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = value(d);
        }
        iters += 1;
    }
    Ok(best.max(fc).max(fd).max(value(lo)).max(value(hi)))
}

/// `Mf(x) = sup_{ε m(x)^2 < t <= 1} |e^{-tL} f(x)|`.
pub fn maximal_function<T: Real>(f: &HermiteExpansion<T>, x: T, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(Error::invalid("maximal-function epsilon must lie in (0, 1]"));
    }
    let m = admissibility(x);
    semigroup_sup(f, x, epsilon * m * m, T::one())
}

/// Seeded bank of random polynomials: degree uniform in `1..=degree_max`,
/// coefficients uniform in the complex unit disc.
pub fn random_polynomials<T: Real>(
    seed: u64,
    count: usize,
    degree_max: usize,
    zero_mean: bool,
    context: GaussianContext<T>,
) -> Result<Vec<HermiteExpansion<T>>> {
    if degree_max < 1 || degree_max > context.degree_max {
        return Err(Error::DegreeOutOfRange {
            degree: degree_max,
            max: context.degree_max,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bank = Vec::with_capacity(count);
    for _ in 0..count {
        let degree = rng.gen_range(1..=degree_max);
        let coefficients: Vec<Complex<T>> = (0..=degree)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                let theta = std::f64::consts::TAU * rng.gen::<f64>();
                Complex::new(T::lit(r * theta.cos()), T::lit(r * theta.sin()))
            })
            .collect();
        let mut f = HermiteExpansion::new(coefficients, context)?;
        if zero_mean {
            f = f.without_mean();
        }
        bank.push(f);
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> GaussianContext<f64> {
        GaussianContext::default()
    }

    fn h(k: usize) -> HermiteExpansion<f64> {
        HermiteExpansion::basis(k, ctx()).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(h(0).eval(7.0).re, 1.0);
        assert!((h(1).eval(1.0).re - 2f64.sqrt()).abs() < 1e-15);
        let f = h(2).sub(&h(1));
        assert!((f.eval(0.0).re + 2.0 / 8f64.sqrt()).abs() < 1e-15);
        assert!(HermiteExpansion::basis(17, ctx()).is_err());
    }

    #[test]
    fn symbol_examples() {
        let f = h(2);
        let g = apply_symbol(&f, &SpectralSymbol::identity());
        assert_eq!(f, g);
        let g = apply_symbol(&f, &SpectralSymbol::heat(0.5));
        assert!((g.coefficient(2).re - 0.367_879_441_171_442_3).abs() < 1e-15);
        let f = HermiteExpansion::from_terms(&[(0, 3.0), (4, 1.0)], ctx()).unwrap();
        let g = apply_symbol(&f, &SpectralSymbol::mean_projection());
        assert_eq!(g.coefficient(0).re, 3.0);
        assert_eq!(g.coefficient(4).re, 0.0);
    }

    #[test]
    fn semigroup_examples() {
        let f = h(1);
        assert_eq!(semigroup(&f, 0.0).unwrap(), f);
        let g = semigroup(&f, 0.5).unwrap();
        assert!((g.coefficient(1).re - (-0.5f64).exp()).abs() < 1e-16);
        let f = HermiteExpansion::from_terms(&[(0, 2.0), (3, 1.0)], ctx()).unwrap();
        let g = semigroup(&f, 60.0).unwrap();
        assert!(g.coefficient_distance(&HermiteExpansion::from_real(&[2.0], ctx()).unwrap()) < 1e-70);
        assert!(semigroup(&f, -1.0).is_err());
    }

    #[test]
    fn t2l_examples() {
        assert_eq!(t2l_semigroup(&h(0), 1.0, 1.0).unwrap().l2_norm(), 0.0);
        let g = t2l_semigroup(&h(1), 1.0, 1.0).unwrap();
        assert!((g.coefficient(1).re - (-1f64).exp()).abs() < 1e-16);
        let g = t2l_semigroup(&h(2), 0.5, 2.0).unwrap();
        assert!((g.coefficient(2).re - 0.5 * (-1f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn maximal_function_examples() {
        assert!((maximal_function(&h(0), 3.0, 0.1).unwrap() - 1.0).abs() < 1e-15);
        // sup attained at the left end t = 0.01: e^{-0.01} sqrt(2)
        let m = maximal_function(&h(1), 1.0, 0.01).unwrap();
        assert!((m - 1.400_141_902_313_301_5).abs() < 1e-12, "{m}");
        assert_eq!(maximal_function(&h(1), 0.0, 0.5).unwrap(), 0.0);
        assert!(maximal_function(&h(1), 0.0, 0.0).is_err());
    }

    #[test]
    fn maximal_function_interior_maximum() {
        // f = h_2 - 3 h_4 at x = 0.3: the modulus peaks inside the window
        let f = HermiteExpansion::from_terms(&[(2, 1.0), (4, -3.0)], ctx()).unwrap();
        let m = maximal_function(&f, 0.3, 1.0 / 64.0).unwrap();
        let fine = (0..200_001)
            .map(|i| {
                let t = 1.0 / 64.0 + (1.0 - 1.0 / 64.0) * i as f64 / 200_000.0;
                semigroup(&f, t).unwrap().eval(0.3).norm()
            })
            .fold(0.0, f64::max);
        assert!(m >= fine - 1e-9 && m <= fine + 1e-6, "{m} {fine}");
    }

    #[test]
    fn parseval_matches_quadrature() {
        let bank = random_polynomials::<f64>(3, 10, 8, false, ctx()).unwrap();
        for f in &bank {
            let q = f.lp_norm(2.0, 1e-12).unwrap();
            assert!((q - f.l2_norm()).abs() < 1e-10 * f.l2_norm());
        }
    }

    #[test]
    fn bank_is_deterministic_and_well_formed() {
        let a = random_polynomials::<f64>(7, 50, 8, true, ctx()).unwrap();
        let b = random_polynomials::<f64>(7, 50, 8, true, ctx()).unwrap();
        assert_eq!(a, b);
        for f in &a {
            assert!(f.is_zero_mean());
            assert!((1..=8).contains(&f.degree()));
            assert!(f.coefficients().iter().all(|c| c.norm() <= 1.0));
        }
        assert!(random_polynomials::<f64>(7, 1, 17, true, ctx()).is_err());
    }

    #[test]
    fn single_precision_expansion() {
        let c = GaussianContext::<f32>::default();
        let f = HermiteExpansion::<f32>::basis(1, c).unwrap();
        let g = semigroup(&f, 0.5).unwrap();
        assert!((g.eval(1.0).re - 0.857_763_9).abs() < 1e-6);
    }
}
