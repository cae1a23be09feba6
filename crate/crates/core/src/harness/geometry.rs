//! Gaussian geometry: annuli, ball measures, doubling within admissibility.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{ReportBuilder, SuiteReport};
use crate::error::Result;
use crate::gaussian::{
    admissibility, annulus_log_measure, annulus_measure, ball_measure, discrete_admissibility, Annulus,
};
use crate::special::erf;

#[derive(Debug, Clone, Serialize)]
pub struct GeometryConfig {
    pub seed: u64,
    /// Size of the fitting sample and of the fresh sample for the doubling constant.
    pub doubling_samples: usize,
    /// Largest annulus index of the additivity and decay checks.
    pub k_max: u32,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            seed: 7,
            doubling_samples: 200,
            k_max: 8,
        }
    }
}

/// Spatial range of the doubling and comparability samples.
const SAMPLE_RADIUS: f64 = 20.0;
/// Allowed excess of the fresh doubling sample over the fitted constant.
const DOUBLING_MARGIN: f64 = 1.01;

fn doubling_ratios(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .map(|_| {
            let x = rng.gen_range(-SAMPLE_RADIUS..SAMPLE_RADIUS);
            let t = admissibility(x) * (1.0 - rng.gen::<f64>());
            Ok(ball_measure(x, 2.0 * t)? / ball_measure(x, t)?)
        })
        .collect()
}

pub fn annuli_suite(config: &GeometryConfig) -> Result<SuiteReport> {
    let mut b = ReportBuilder::new("annuli");
    b.config("seed", config.seed)
        .config("doubling_samples", config.doubling_samples)
        .config("k_max", config.k_max)
        .config("doubling_margin", DOUBLING_MARGIN);

    // closed forms
    let c0 = annulus_measure::<f64>(&Annulus::plain(0));
    let c1 = annulus_measure::<f64>(&Annulus::plain(1));
    b.assert_le(
        "gamma(C_0) = erf(1)",
        json!({ "k": 0 }),
        (c0 - erf(1.0)).abs(),
        1e-14,
        0.0,
    );
    b.assert_le(
        "gamma(C_1) = erf(2) - erf(1)",
        json!({ "k": 1 }),
        (c1 - (erf(2.0) - erf(1.0))).abs(),
        1e-14,
        0.0,
    );

    // additivity and containment
    let mut running = 0.0;
    for k in 0..=config.k_max {
        running += annulus_measure::<f64>(&Annulus::plain(k));
        let ball = ball_measure(0.0, 2f64.powi(k as i32))?;
        b.assert_le(
            format!("additivity k={k}"),
            json!({ "k": k }),
            (ball - running).abs(),
            1e-12,
            0.0,
        );
        let (a, s) = (Annulus::plain(k), Annulus::starred(k));
        let outside = (s.inner::<f64>() - a.inner::<f64>()).max(0.0) + (a.outer::<f64>() - s.outer::<f64>()).max(0.0);
        b.assert_le(format!("C_{k} inside C_{k}*"), json!({ "k": k }), outside, 0.0, 0.0);
    }

    // decay ln γ(C_k) <= -c 4^k over k = 2..6, c fitted as the largest admissible
    let decay: Vec<(u32, f64)> = (2..=6)
        .map(|k| (k, annulus_log_measure::<f64>(&Annulus::plain(k))))
        .collect();
    let c = decay
        .iter()
        .map(|&(k, l)| -l / 4f64.powi(k as i32))
        .fold(f64::INFINITY, f64::min);
    b.fitted_constant("c_annulus_decay", c);
    b.assert_le("annulus decay rate c > 0", json!({ "k_range": [2, 6] }), -c, 0.0, 0.0);
    b.evidence(
        "log_gamma_C_k",
        decay
            .iter()
            .map(|&(k, l)| json!({ "k": k, "ln_measure": l }))
            .collect::<Vec<_>>(),
    );

    // doubling within admissibility: fit on one sample, check a fresh one
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fit = doubling_ratios(&mut rng, config.doubling_samples)?;
    let constant = fit.iter().copied().fold(0.0f64, f64::max);
    b.fitted_constant("C_doubling", constant);
    let fresh = doubling_ratios(&mut rng, config.doubling_samples)?;
    let fresh_worst = fresh.iter().copied().fold(0.0f64, f64::max);
    b.fitted_le(
        "doubling on fresh sample",
        json!({ "samples": config.doubling_samples, "radius": SAMPLE_RADIUS }),
        fresh_worst,
        DOUBLING_MARGIN * constant,
        0.0,
    );

    // m and m̃ are comparable within a factor 2
    let mut worst = 0.0f64;
    let mut xs: Vec<f64> = (0..1000)
        .map(|_| rng.gen_range(-4.0 * SAMPLE_RADIUS..4.0 * SAMPLE_RADIUS))
        .collect();
    xs.extend((0..8).flat_map(|k| [2f64.powi(k), -2f64.powi(k), 0.999 * 2f64.powi(k)]));
    for &x in &xs {
        let (m, mt) = (admissibility(x), discrete_admissibility(x));
        worst = worst.max(m / (2.0 * mt)).max(mt / (2.0 * m));
    }
    b.assert_le(
        "m and discrete m within factor 2",
        json!({ "samples": xs.len() }),
        worst,
        1.0,
        0.0,
    );
    Ok(b.finish())
}
