//! Gaussian rules and a globally adaptive composite Gauss-Legendre integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Nodes and weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f`.
    pub fn sum<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss-Legendre rule with `n` nodes on [-1, 1], by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Real>(n: usize) -> GaussRule<T> {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of_usize(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (T::PI() * (T::of_usize(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let mut p1 = T::one();
            let mut p2 = T::zero();
            for j in 1..=n {
                let jf = T::of_usize(j);
                let p3 = p2;
                p2 = p1;
                p1 = ((T::lit(2.0) * jf - T::one()) * z * p2 - (jf - T::one()) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - T::one());
            let dz = p1 / dp;
            z = z - dz;
            if dz.abs() <= T::epsilon() {
                break;
            }
        }
        // recompute derivative at the converged node
        let mut p1 = T::one();
        let mut p2 = T::zero();
        for j in 1..=n {
            let jf = T::of_usize(j);
            let p3 = p2;
            p2 = p1;
            p1 = ((T::lit(2.0) * jf - T::one()) * z * p2 - (jf - T::one()) * p3) / jf;
        }
        if z * z != T::one() {
            dp = nf * (z * p1 - p2) / (z * z - T::one());
        }
        let w = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    GaussRule { nodes, weights }
}

/// Gauss-Hermite rule normalised to the Gaussian probability measure
/// `pi^{-1/2} e^{-x^2} dx`: exact for polynomials of degree `<= 2n - 1`,
/// weights summing to one.
pub fn gamma_quadrature<T: Real>(n: usize) -> Result<GaussRule<T>> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of_usize(n);
    let pim4 = T::PI().powf(T::lit(-0.25));
    let m = n.div_ceil(2);
    let mut z = T::zero();
    for i in 0..m {
        z = match i {
            0 => {
                let s = T::lit(2.0) * nf + T::one();
                s.sqrt() - T::lit(1.855_75) * s.powf(T::lit(-1.0 / 6.0))
            }
            1 => z - T::lit(1.14) * nf.powf(T::lit(0.426)) / z,
            2 => T::lit(1.86) * z - T::lit(0.86) * nodes[0],
            3 => T::lit(1.91) * z - T::lit(0.91) * nodes[1],
            _ => T::lit(2.0) * z - nodes[i - 2],
        };
        let mut pp = T::zero();
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = T::zero();
            for j in 1..=n {
                let jf = T::of_usize(j);
                let p3 = p2;
                p2 = p1;
                p1 = z * (T::lit(2.0) / jf).sqrt() * p2 - ((jf - T::one()) / jf).sqrt() * p3;
            }
            pp = (T::lit(2.0) * nf).sqrt() * p2;
            let dz = p1 / pp;
            z = z - dz;
            if dz.abs() <= T::epsilon() * T::lit(4.0) * z.abs().max(T::one()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::no_convergence(
                "Gauss-Hermite node search",
                format!("node {i} of {n}"),
            ));
        }
        let w = T::lit(2.0) / (pp * pp) * T::frac_1_sqrt_pi();
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    nodes.reverse();
    weights.reverse();
    Ok(GaussRule { nodes, weights })
}

/// Values the adaptive integrator can accumulate: reals and complex numbers.
pub trait QuadValue<T: Real>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {
    fn zero() -> Self;
    fn modulus(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn modulus(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn modulus(&self) -> T {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T, V> {
    pub value: V,
    /// Estimate of the integral of `|f|`; the scale the relative tolerance refers to.
    pub magnitude: T,
    pub error: T,
    pub intervals: usize,
}

/// Globally adaptive bisection driven by the gap between a 16-point
/// Gauss-Legendre panel and the same rule on its two halves.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    magnitude: T,
    error: T,
}

struct Keyed<T, V>(Panel<T, V>);

impl<T: Real, V> PartialEq for Keyed<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real, V> Eq for Keyed<T, V> {}
impl<T: Real, V> PartialOrd for Keyed<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Keyed<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .as_f64()
            .total_cmp(&other.0.error.as_f64())
            .then_with(|| other.0.a.as_f64().total_cmp(&self.0.a.as_f64()))
    }
}

fn gl16<T: Real, V: QuadValue<T>, F: FnMut(T) -> V>(f: &mut F, a: T, b: T) -> (V, T) {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut acc = V::zero();
    let mut mag = T::zero();
    for &(x, w) in T::gauss_legendre_16() {
        let v = f(mid + half * x);
        acc = acc + v * (w * half);
        mag = mag + v.modulus() * w * half.abs();
    }
    (acc, mag)
}

impl<T: Real> Adaptive<T> {
    pub fn new(rel_tol: T) -> Self {
        Adaptive {
            rel_tol,
            abs_tol: T::zero(),
            max_intervals: 4000,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn refine<V: QuadValue<T>, F: FnMut(T) -> V>(f: &mut F, a: T, b: T, whole: V) -> [Panel<T, V>; 2] {
        let m = (a + b) / T::lit(2.0);
        let (lv, lm) = gl16(f, a, m);
        let (rv, rm) = gl16(f, m, b);
        let err = (whole - (lv + rv)).modulus();
        // both halves inherit the parent's discrepancy, split evenly
        let e = err / T::lit(2.0);
        [
            Panel {
                a,
                b: m,
                value: lv,
                magnitude: lm,
                error: e,
            },
            Panel {
                a: m,
                b,
                value: rv,
                magnitude: rm,
                error: e,
            },
        ]
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal initial panels.
    pub fn integrate_panels<V: QuadValue<T>, F: FnMut(T) -> V>(
        &self,
        f: F,
        a: T,
        b: T,
        panels: usize,
    ) -> Result<Estimate<T, V>> {
        let panels = panels.max(1);
        let h = (b - a) / T::of_usize(panels);
        let breaks: Vec<T> = (0..=panels)
            .map(|i| if i == panels { b } else { a + h * T::of_usize(i) })
            .collect();
        self.integrate(f, &breaks)
    }

    /// Integrates `f` over the segments between consecutive (sorted) `breaks`.
    pub fn integrate<V: QuadValue<T>, F: FnMut(T) -> V>(&self, mut f: F, breaks: &[T]) -> Result<Estimate<T, V>> {
        let mut heap: BinaryHeap<Keyed<T, V>> = BinaryHeap::new();
        let mut done: Vec<Panel<T, V>> = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let (whole, _) = gl16(&mut f, a, b);
            for p in Self::refine(&mut f, a, b, whole) {
                heap.push(Keyed(p));
            }
        }
        let mut count = heap.len();
        let (mut err, mut mag) = (T::zero(), T::zero());
        for p in heap.iter().map(|k| &k.0) {
            err = err + p.error;
            mag = mag + p.magnitude;
        }
        let mut since_resum = 0usize;
        loop {
            if since_resum >= 256 {
                // refresh the running totals against accumulated rounding
                err = T::zero();
                mag = T::zero();
                for p in heap.iter().map(|k| &k.0).chain(done.iter()) {
                    err = err + p.error;
                    mag = mag + p.magnitude;
                }
                since_resum = 0;
            }
            let target = self.abs_tol.max(self.rel_tol * mag);
            if err <= target || heap.is_empty() {
                break;
            }
            let Some(Keyed(worst)) = heap.pop() else { break };
            if worst.error <= T::zero() {
                done.push(worst);
                continue;
            }
            let width = worst.b - worst.a;
            let scale = worst.a.abs().max(worst.b.abs()).max(T::min_positive_value());
            if width <= scale * T::epsilon() * T::lit(64.0) {
                // cannot split further; keep its contribution
                done.push(worst);
                continue;
            }
            if count >= self.max_intervals {
                return Err(Error::no_convergence(
                    "adaptive quadrature",
                    format!(
                        "error {:.3e} above target {:.3e} after {} intervals (worst near [{:.6e}, {:.6e}])",
                        err.as_f64(),
                        target.as_f64(),
                        count,
                        worst.a.as_f64(),
                        worst.b.as_f64()
                    ),
                ));
            }
            err = err - worst.error;
            mag = mag - worst.magnitude;
            for p in Self::refine(&mut f, worst.a, worst.b, worst.value) {
                err = err + p.error;
                mag = mag + p.magnitude;
                heap.push(Keyed(p));
            }
            count += 1;
            since_resum += 1;
        }
        let mut panels: Vec<Panel<T, V>> = heap.into_iter().map(|k| k.0).chain(done).collect();
        panels.sort_by(|x, y| x.a.as_f64().total_cmp(&y.a.as_f64()));
        let mut value = V::zero();
        let (mut magnitude, mut error) = (T::zero(), T::zero());
        for p in &panels {
            value = value + p.value;
            magnitude = magnitude + p.magnitude;
            error = error + p.error;
        }
        Ok(Estimate {
            value,
            magnitude,
            error,
            intervals: panels.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre::<f64>(16);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^30 over [-1,1] = 2/31
        assert!((rule.sum(|x| x.powi(30)) - 2.0 / 31.0).abs() < 1e-14);
        let r5 = gauss_legendre::<f64>(5);
        assert_eq!(r5.nodes[2], 0.0);
        assert!((r5.sum(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let r2 = gamma_quadrature::<f64>(2).unwrap();
        assert!((r2.sum(|x| x * x) - 0.5).abs() < 1e-15);
        let r8 = gamma_quadrature::<f64>(8).unwrap();
        assert!((r8.sum(|x| x.powi(6)) - 15.0 / 8.0).abs() < 1e-13);
        for n in [1usize, 3, 7, 20, 40] {
            let r = gamma_quadrature::<f64>(n).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13, "n = {n}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(gamma_quadrature::<f64>(0).is_err());
    }

    #[test]
    fn adaptive_handles_kinks() {
        let q = Adaptive::new(1e-12);
        let est = q.integrate(|x: f64| (x - 0.3).abs(), &[-1.0, 1.0]).unwrap();
        assert!((est.value - (1.3f64 * 1.3 + 0.7 * 0.7) / 2.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_complex_oscillation() {
        let q = Adaptive::new(1e-12);
        let est = q
            .integrate_panels(|x: f64| Complex::new(0.0, 10.0 * x).exp(), 0.0, 1.0, 4)
            .unwrap();
        let exact = (Complex::new(0.0, 10.0f64).exp() - 1.0) / Complex::new(0.0, 10.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let q = Adaptive::new(1e-14).with_max_intervals(8);
        let r = q.integrate(|x: f64| (1.0 / x.max(1e-300)).sqrt(), &[0.0, 1.0]);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
