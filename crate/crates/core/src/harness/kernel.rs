//! The Mehler kernel against the spectral side: agreement, conservativity,
//! symmetry, positivity and the time derivative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{collect_ordered, ReportBuilder, SuiteReport};
use crate::error::Result;
use crate::gaussian::GaussianContext;
use crate::mehler::{
    kernel_apply, kernel_apply_t2l, kernel_mass, mehler_kernel, mehler_kernel_dt, mehler_log_kernel,
    TruncatedPolynomial,
};
use crate::spectral::HermiteExpansion;

#[derive(Debug, Clone, Serialize)]
pub struct KernelConfig {
    pub seed: u64,
    pub degree_max: usize,
    pub times: Vec<f64>,
    /// Number of evaluation points, uniform on `[-4, 4]`.
    pub x_points: usize,
    pub mass_times: Vec<f64>,
    pub mass_points: Vec<f64>,
    /// Random `(t, x, y)` triples of the symmetry and positivity checks.
    pub triples: usize,
    /// Random `(t, x, y)` triples of the derivative check.
    pub derivative_samples: usize,
    pub tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            seed: 7,
            degree_max: 10,
            times: vec![0.01, 0.1, 1.0],
            x_points: 9,
            mass_times: vec![0.01, 0.1, 0.5, 1.0, 3.0],
            mass_points: vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
            triples: 200,
            derivative_samples: 100,
            tol: 1e-13,
        }
    }
}

const AGREEMENT_TOL: f64 = 1e-8;
const MASS_TOL: f64 = 1e-10;
const DERIVATIVE_TOL: f64 = 1e-6;
/// Central-difference step relative to `t`.
const DIFFERENCE_STEP: f64 = 1e-4;

fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Agreement error is `|kernel − spectral| / max(|spectral|, 1)`; the
/// derivative error is `|∂_t M − central difference| / max(|∂_t M|, M)`;
/// positivity is read off the log-domain kernel, which stays finite where `M`
/// itself underflows.
pub fn kernel_suite(config: &KernelConfig) -> Result<SuiteReport> {
    let ctx = GaussianContext::default().with_degree_max(config.degree_max.max(1))?;
    let xs = uniform_grid(-4.0, 4.0, config.x_points);
    let tol = config.tol;
    let mut b = ReportBuilder::new("kernel");
    b.config("seed", config.seed)
        .config("degree_max", config.degree_max)
        .config("times", &config.times)
        .config("x_grid", &xs)
        .config("mass_times", &config.mass_times)
        .config("mass_points", &config.mass_points)
        .config("triples", config.triples)
        .config("derivative_samples", config.derivative_samples)
        .config("tol", tol);

    // e^{-sL} h_k through the kernel against e^{-sk} h_k(x)
    let jobs: Vec<(usize, f64)> = (0..=config.degree_max)
        .flat_map(|k| config.times.iter().map(move |&s| (k, s)))
        .collect();
    let errors: Vec<f64> = collect_ordered(
        jobs.par_iter()
            .map(|&(k, s)| {
                let hk = HermiteExpansion::basis(k, ctx)?;
                let g = TruncatedPolynomial::whole(hk.clone());
                let mut worst = 0.0f64;
                for &x in &xs {
                    let exact = (-s * k as f64).exp() * hk.eval(x).re;
                    let v = kernel_apply(&g, s, x, tol)?;
                    worst = worst.max((v.re - exact).hypot(v.im) / exact.abs().max(1.0));
                }
                Ok(worst)
            })
            .collect(),
    )?;
    for &s in &config.times {
        let worst = jobs
            .iter()
            .zip(&errors)
            .filter(|((_, t), _)| *t == s)
            .map(|(_, &e)| e)
            .fold(0.0f64, f64::max);
        b.assert_le(
            format!("spectral agreement s={s}"),
            json!({ "s": s, "k_max": config.degree_max, "points": xs.len() }),
            worst,
            AGREEMENT_TOL,
            0.0,
        );
    }

    // conservativity
    let mass_jobs: Vec<(f64, f64)> = config
        .mass_times
        .iter()
        .flat_map(|&t| config.mass_points.iter().map(move |&x| (t, x)))
        .collect();
    let masses: Vec<f64> = collect_ordered(mass_jobs.par_iter().map(|&(t, x)| kernel_mass(t, x, tol)).collect())?;
    for &t in &config.mass_times {
        let worst = mass_jobs
            .iter()
            .zip(&masses)
            .filter(|((s, _), _)| *s == t)
            .map(|(_, &m)| (m - 1.0).abs())
            .fold(0.0f64, f64::max);
        b.assert_le(
            format!("mass t={t}"),
            json!({ "t": t, "x": config.mass_points }),
            worst,
            MASS_TOL,
            0.0,
        );
    }

    // symmetry (bitwise) and positivity
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut asymmetric = 0usize;
    let mut nonpositive = 0usize;
    for _ in 0..config.triples {
        let t = 10f64.powf(rng.gen_range(-2.0..1.0));
        let (x, y) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (a, c) = (mehler_log_kernel(t, x, y)?, mehler_log_kernel(t, y, x)?);
        if a.to_bits() != c.to_bits() || mehler_kernel(t, x, y)?.to_bits() != mehler_kernel(t, y, x)?.to_bits() {
            asymmetric += 1;
        }
        // M = exp(ln M) is positive whenever its logarithm is finite
        if !a.is_finite() {
            nonpositive += 1;
        }
    }
    b.assert_le(
        "symmetry",
        json!({ "triples": config.triples }),
        asymmetric as f64,
        0.0,
        0.0,
    );
    b.assert_le(
        "positivity",
        json!({ "triples": config.triples }),
        nonpositive as f64,
        0.0,
        0.0,
    );

    // time derivative against central differences
    let mut worst = 0.0f64;
    for _ in 0..config.derivative_samples {
        let t = rng.gen_range(0.05..3.0);
        let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let h = DIFFERENCE_STEP * t;
        let m = |dt: f64| mehler_kernel(t + dt, x, y);
        // fourth-order central difference
        let fd = (8.0 * (m(h)? - m(-h)?) - (m(2.0 * h)? - m(-2.0 * h)?)) / (12.0 * h);
        let d = mehler_kernel_dt(t, x, y)?;
        worst = worst.max((d - fd).abs() / d.abs().max(mehler_kernel(t, x, y)?));
    }
    b.assert_le(
        "time derivative vs central differences",
        json!({ "samples": config.derivative_samples, "relative_step": DIFFERENCE_STEP }),
        worst,
        DERIVATIVE_TOL,
        0.0,
    );

    // t^2 L e^{-t^2 L} h_1 = t^2 e^{-t^2} h_1
    let h1 = TruncatedPolynomial::whole(HermiteExpansion::basis(1, ctx)?);
    let mut worst = 0.0f64;
    for &x in &xs {
        let v = kernel_apply_t2l(&h1, 0.5, 1.0, x, tol)?;
        let want = 0.25 * (-0.25f64).exp() * 2f64.sqrt() * x;
        worst = worst.max((v.re - want).hypot(v.im));
    }
    b.assert_le(
        "t2L semigroup of h_1, t=0.5",
        json!({ "t": 0.5, "damping": 1.0 }),
        worst,
        1e-10,
        0.0,
    );
    Ok(b.finish())
}
