//! The admissible decomposition `φ(L)f = c(π1 u + π2 f + π3 f)` on a point grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{collect_ordered, ReportBuilder, SuiteReport};
use crate::decomposition::{build_u, head_spectral, reconstruct, scaling_constant, DecompositionParams, RESIDUAL_GRID};
use crate::error::Result;
use crate::gaussian::{discrete_admissibility, GaussianContext};
use crate::multipliers::{make_phi, phi_lambda, PhiKind, PhiProfile};
use crate::quadrature::Adaptive;
use crate::spectral::HermiteExpansion;

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionConfig {
    pub params: DecompositionParams,
    pub tau_list: Vec<f64>,
    pub grid: Vec<f64>,
    /// Bound on `max_x |φ(L)f(x) - c(π1 u + π2 f + π3 f)(x)|`.
    pub residual_tol: f64,
    /// Tolerances of the residual-trend evidence (coarse to fine).
    pub trend_tols: Vec<f64>,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            params: DecompositionParams::default(),
            tau_list: vec![1.0],
            grid: RESIDUAL_GRID.to_vec(),
            residual_tol: 1e-5,
            trend_tols: vec![1e-4, 1e-5, 1e-6],
        }
    }
}

/// Largest eigenvalue of the scalar identity check.
const SCALAR_K_MAX: usize = 4;
const SCALAR_TOL: f64 = 1e-8;

fn profiles(tau_list: &[f64]) -> Result<Vec<(String, PhiProfile)>> {
    let mut out = vec![("constant".to_string(), make_phi(PhiKind::Constant)?)];
    for &tau in tau_list {
        out.push((
            format!("imaginary_power(tau={tau})"),
            make_phi(PhiKind::ImaginaryPower(tau))?,
        ));
        out.push((
            format!("damped_imaginary(tau={tau})"),
            make_phi(PhiKind::DampedImaginary(tau))?,
        ));
    }
    Ok(out)
}

/// `c ∫_0^∞ Φ((δ'+δ)t^2)(t^2 k)^2 e^{-(δ'+δ)t^2 k} dt/t`, integrated in `ln t`.
fn scalar_reconstruction(phi: &PhiProfile, params: &DecompositionParams, k: usize) -> Result<Complex64> {
    let c = scaling_constant(params.delta, params.delta_prime)?;
    let sum = params.damping_sum();
    let kf = k as f64;
    let breaks: Vec<f64> = (0..=80).map(|i| -12.0 + 0.25 * i as f64).collect();
    let v = Adaptive::new(1e-12).integrate(
        |sigma: f64| {
            let t = sigma.exp();
            let a = t * t * kf;
            phi.phi(sum * t * t) * (a * a * (-sum * a).exp())
        },
        &breaks,
    )?;
    Ok(v.value * c)
}

/// For `f ∈ {h_1, h_1+h_3, h_2-h_4}` and every profile: the reconstruction
/// residual, the kernel/spectral consistency `c|π1 u + π2 f - head| `, and the
/// exact partition `u + (complement) = t^2 L e^{-δ t^2 L} f` are asserted,
/// together with the per-eigenvalue scalar identity. The residual trend in the
/// `dt/t` tolerance is evidence.
pub fn decomposition_suite(config: &DecompositionConfig) -> Result<SuiteReport> {
    let params = &config.params;
    params.validate()?;
    let ctx = GaussianContext::default();
    let fs = vec![
        ("h_1".to_string(), HermiteExpansion::basis(1, ctx)?),
        (
            "h_1+h_3".to_string(),
            HermiteExpansion::from_terms(&[(1, 1.0), (3, 1.0)], ctx)?,
        ),
        (
            "h_2-h_4".to_string(),
            HermiteExpansion::from_terms(&[(2, 1.0), (4, -1.0)], ctx)?,
        ),
    ];
    let phis = profiles(&config.tau_list)?;
    let c = scaling_constant(params.delta, params.delta_prime)?;
    let mut b = ReportBuilder::new("decomposition");
    b.config("params", params)
        .config("tau_list", &config.tau_list)
        .config("grid", &config.grid)
        .config("residual_tol", config.residual_tol)
        .config("trend_tols", &config.trend_tols)
        .config("constraint_violations", params.constraint_violations());
    b.evidence("scaling_constant", c);

    // per-eigenvalue scalar identity
    for (label, phi) in &phis {
        let mut worst = 0.0f64;
        for k in 1..=SCALAR_K_MAX {
            let v = scalar_reconstruction(phi, params, k)?;
            worst = worst.max((v - phi_lambda(phi, k as f64, 1e-12)?).norm());
        }
        b.assert_le(
            format!("scalar identity {label}"),
            json!({ "phi": label, "k_max": SCALAR_K_MAX }),
            worst,
            SCALAR_TOL,
            0.0,
        );
    }

    // reconstruction and kernel/spectral consistency
    let jobs: Vec<(usize, usize)> = (0..fs.len())
        .flat_map(|fi| (0..phis.len()).map(move |pi| (fi, pi)))
        .collect();
    let results: Vec<(f64, f64, serde_json::Value)> = collect_ordered(
        jobs.iter()
            .map(|&(fi, pi)| {
                let (f, phi) = (&fs[fi].1, &phis[pi].1);
                let r = reconstruct(f, phi, params, &config.grid)?;
                let heads: Vec<Complex64> = collect_ordered(
                    config
                        .grid
                        .par_iter()
                        .map(|&x| head_spectral(f, phi, params, x))
                        .collect(),
                )?;
                let consistency = r
                    .points
                    .iter()
                    .zip(&heads)
                    .map(|(p, h)| {
                        let kernel = Complex64::new(p.pi1[0] + p.pi2[0], p.pi1[1] + p.pi2[1]);
                        c * (kernel - h).norm()
                    })
                    .fold(0.0f64, f64::max);
                Ok((
                    r.max_residual,
                    consistency,
                    serde_json::to_value(&r.points).unwrap_or_default(),
                ))
            })
            .collect(),
    )?;
    let mut pieces = Vec::new();
    for (&(fi, pi), (residual, consistency, points)) in jobs.iter().zip(&results) {
        let inputs = json!({ "f": fs[fi].0, "phi": phis[pi].0, "grid": config.grid });
        b.assert_le(
            format!("residual {} {}", fs[fi].0, phis[pi].0),
            inputs.clone(),
            *residual,
            config.residual_tol,
            0.0,
        );
        b.assert_le(
            format!("kernel vs spectral head {} {}", fs[fi].0, phis[pi].0),
            inputs,
            *consistency,
            config.residual_tol,
            0.0,
        );
        pieces.push(json!({ "f": fs[fi].0, "phi": phis[pi].0, "points": points }));
    }
    b.evidence("pieces", pieces);

    // exact partition of t^2 L e^{-δ t^2 L} f by the admissible region
    let mut mismatches = 0usize;
    let ys = [0.0, 0.7, 1.0, 1.9, 3.0, 5.0, -9.0];
    let ts = [0.01, 0.1, 0.3, 0.6, 0.99, 1.5];
    for (_, f) in &fs {
        let u = build_u(f, params.delta)?;
        for &y in &ys {
            for &t in &ts {
                let outside = if t < discrete_admissibility(y) {
                    Complex64::new(0.0, 0.0)
                } else {
                    u.uncut(y, t)
                };
                if u.eval(y, t) + outside != u.uncut(y, t) {
                    mismatches += 1;
                }
            }
        }
    }
    b.assert_le(
        "partition by the admissible region",
        json!({ "y": ys, "t": ts }),
        mismatches as f64,
        0.0,
        0.0,
    );

    // residual trend in the dt/t tolerance, on the worst combination
    let worst = jobs
        .iter()
        .zip(&results)
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(&j, _)| j)
        .unwrap_or((0, 0));
    let (f, phi) = (&fs[worst.0], &phis[worst.1]);
    let mut trend = Vec::new();
    for &t_tol in &config.trend_tols {
        let p = DecompositionParams { t_tol, ..*params };
        trend.push(json!({ "t_tol": t_tol, "residual": reconstruct(&f.1, &phi.1, &p, &config.grid)?.max_residual }));
    }
    b.evidence("residual_trend", json!({ "f": f.0, "phi": phi.0, "runs": trend }));
    for v in params.constraint_violations() {
        b.note(format!("constraint violated: {v}"));
    }
    Ok(b.finish())
}
