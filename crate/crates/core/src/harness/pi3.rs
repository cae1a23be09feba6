//! Pointwise control of the spectral tail `π3 f` by boundary-time semigroup terms.
//!
//! With `s = (δ'+δ) t^2` and `s_a = (δ'+δ) m̃(x)^2/κ^2`,
//! `π3 f(x) = (2(δ'+δ)^2)^{-1} ∫_{s_a}^∞ Φ(s) s L^2 e^{-sL} f(x) ds`. Two
//! integrations by parts (boundary terms at infinity vanish for zero-mean `f`)
//! give the exact bound `|π3 f(x)| <= (T1 + T2 + 2 T3) / (2(δ'+δ)^2)` with
//! `T1 = sup|Φ| |s_a L e^{-s_a L} f(x)|`, `T2 = sup(|Φ| + s|Φ'|) |e^{-s_a L} f(x)|`
//! and `T3 = ∫_{s_a}^∞ (|Φ'| + s|Φ''|) |e^{-sL} f(x)| ds`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{collect_ordered, ReportBuilder, SuiteReport, EXACT_SLACK};
use crate::decomposition::{pi3, DecompositionParams, RESIDUAL_GRID};
use crate::error::{Error, Result};
use crate::gaussian::{discrete_admissibility, log_lp_norm_on, GaussianContext, Support};
use crate::multipliers::{check_bounds, check_condition_d, make_phi, PhiKind, PhiProfile};
use crate::quadrature::Adaptive;
use crate::spectral::{apply_symbol, random_polynomials, semigroup, HermiteExpansion, SpectralSymbol};

/// `‖(1 + log_+|·|) h_1‖_{L^1(γ)} = √(2/π) + 2√2 π^{-1/2} ∫_1^∞ x ln x e^{-x^2} dx`
/// `= √(2/π) (1 + E_1(1)/2)`.
pub const LOG_WEIGHT_NORM_H1: f64 = 0.885_406_087_874_052_5;

#[derive(Debug, Clone, Serialize)]
pub struct Pi3Config {
    pub params: DecompositionParams,
    /// Frequencies of the damped imaginary-power profiles.
    pub tau_list: Vec<f64>,
    pub seed: u64,
    pub bank_size: usize,
    pub degree_max: usize,
    pub x_grid: Vec<f64>,
    /// Tolerance of the `T3` integral and of the Condition D check.
    pub tol: f64,
}

impl Default for Pi3Config {
    fn default() -> Self {
        let mut x_grid = RESIDUAL_GRID.to_vec();
        x_grid.extend([-4.0, 4.0]);
        Pi3Config {
            params: DecompositionParams::default(),
            tau_list: vec![1.0],
            seed: 7,
            bank_size: 5,
            degree_max: 8,
            x_grid,
            tol: 1e-10,
        }
    }
}

/// Grid size of the profile suprema.
const SUP_SAMPLES: usize = 400;
/// Upper end of the `T3` integral; beyond it `|e^{-sL} f| <= e^{-s} Σ|c_k h_k(x)|`
/// is below `e^{-64}` of the data.
const T3_HORIZON: f64 = 64.0;

/// The three right-hand terms at one point.
#[derive(Debug, Clone, Copy, Serialize)]
struct Terms {
    boundary_generator: f64,
    boundary_semigroup: f64,
    tail: f64,
}

fn terms(
    f: &HermiteExpansion<f64>,
    phi: &PhiProfile,
    sup_first: f64,
    params: &DecompositionParams,
    x: f64,
    tol: f64,
) -> Result<Terms> {
    let a = discrete_admissibility(x) / params.kappa;
    let s_a = params.damping_sum() * a * a;
    let t1 = sup_first * apply_symbol(f, &SpectralSymbol::t_l_heat(s_a)).eval(x).norm();
    let t2 = sup_first * semigroup(f, s_a)?.eval(x).norm();
    let mut breaks = vec![s_a];
    let mut s = 2.0 * s_a;
    while s < T3_HORIZON {
        breaks.push(s);
        s *= 2.0;
    }
    breaks.push(T3_HORIZON.max(2.0 * s_a));
    breaks.extend(phi.breakpoints.iter().copied().filter(|&b| b > s_a && b < T3_HORIZON));
    breaks.sort_by(f64::total_cmp);
    let scale: f64 = f.coefficients().iter().map(|c| c.norm()).sum();
    let mut failure = None;
    let est = Adaptive::new(tol)
        .with_abs_tol(tol * 1e-3 * scale)
        .with_max_intervals(4000)
        .integrate(
            |s: f64| {
                let h = match semigroup(f, s) {
                    Ok(g) => g.eval(x).norm(),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                };
                (phi.dphi(s).norm() + s * phi.d2phi(s).norm()) * h
            },
            &breaks,
        )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Terms {
        boundary_generator: t1,
        boundary_semigroup: t2,
        tail: est.value,
    })
}

/// Condition D gate, then for every `(Φ, f, x)` the exact integration-by-parts
/// bound is asserted and `|π3 f(x)| <= C (T1 + T2 + T3)/(2(δ'+δ)^2)` is checked
/// with one `C` fitted on the anchor `f = h_1` (over the x-grid and the profiles). The
/// pure imaginary power is offered to the gate and its rejection recorded.
pub fn pi3_pointwise_suite(config: &Pi3Config) -> Result<SuiteReport> {
    let params = &config.params;
    params.validate()?;
    let tol = config.tol;
    let mut b = ReportBuilder::new("pi3");
    b.config("params", params)
        .config("tau_list", &config.tau_list)
        .config("seed", config.seed)
        .config("bank_size", config.bank_size)
        .config("degree_max", config.degree_max)
        .config("x_grid", &config.x_grid)
        .config("tol", tol)
        .config("anchor", json!({ "f": "h_1", "x": "x_grid" }));

    // the Condition D gate
    let mut candidates = vec![("constant".to_string(), PhiKind::Constant)];
    for &tau in &config.tau_list {
        candidates.push((format!("damped_imaginary(tau={tau})"), PhiKind::DampedImaginary(tau)));
        candidates.push((format!("imaginary_power(tau={tau})"), PhiKind::ImaginaryPower(tau)));
    }
    let mut profiles = Vec::new();
    let mut gate = Vec::new();
    for (label, kind) in candidates {
        let phi = make_phi(kind)?;
        let d = check_condition_d(&phi, tol)?;
        let admitted = d.holds;
        gate.push(json!({ "phi": label, "condition_d": d.holds, "integral_estimate": d.integral_estimate }));
        if admitted {
            let bounds = check_bounds(&phi, SUP_SAMPLES);
            profiles.push((label, phi, bounds.sup_first));
        } else {
            let e = Error::Precondition(format!("{label} fails Condition D"));
            b.note(format!("rejected by the suite precondition: {e}"));
        }
    }
    b.evidence("condition_d_gate", gate);
    if profiles.is_empty() {
        return Err(Error::Precondition("no profile passes Condition D".into()));
    }

    let ctx = GaussianContext::default();
    let mut fs = vec![
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
    for (i, f) in random_polynomials(config.seed, config.bank_size, config.degree_max, true, ctx)?
        .into_iter()
        .enumerate()
    {
        fs.push((format!("bank[{i}]"), f));
    }

    let jobs: Vec<(usize, usize, f64)> = (0..profiles.len())
        .flat_map(|pi| (0..fs.len()).flat_map(move |fi| config.x_grid.iter().map(move |&x| (pi, fi, x))))
        .collect();
    let prefactor = 1.0 / (2.0 * params.damping_sum().powi(2));
    let results: Vec<(f64, Terms)> = collect_ordered(
        jobs.par_iter()
            .map(|&(pi, fi, x)| {
                let (_, phi, sup_first) = &profiles[pi];
                let v: Complex64 = pi3(&fs[fi].1, phi, params, x)?;
                Ok((v.norm(), terms(&fs[fi].1, phi, *sup_first, params, x, tol)?))
            })
            .collect(),
    )?;

    // h_1 vanishes at x = 0 together with every term, so the anchor is the h_1 column
    let is_anchor = |&(_, fi, _): &(usize, usize, f64)| fi == 0;
    let sum3 = |t: &Terms| prefactor * (t.boundary_generator + t.boundary_semigroup + t.tail);
    let c = jobs
        .iter()
        .zip(&results)
        .filter(|(j, (_, t))| is_anchor(j) && sum3(t) > 0.0)
        .map(|(_, (v, t))| v / sum3(t))
        .fold(0.0f64, f64::max);
    b.fitted_constant("C_pi3_pointwise", c);

    for (&(pi, fi, x), (v, t)) in jobs.iter().zip(&results) {
        let inputs = json!({ "phi": profiles[pi].0, "f": fs[fi].0, "x": x, "terms": t, "prefactor": prefactor });
        let exact = prefactor * (t.boundary_generator + t.boundary_semigroup + 2.0 * t.tail);
        b.assert_le(
            format!("pi3 exact bound {} {} x={x}", profiles[pi].0, fs[fi].0),
            inputs.clone(),
            *v,
            exact,
            EXACT_SLACK * exact.max(f64::MIN_POSITIVE),
        );
        b.fitted_le(
            format!("pi3 fitted bound {} {} x={x}", profiles[pi].0, fs[fi].0),
            inputs,
            *v,
            c * sum3(t),
            EXACT_SLACK * c * sum3(t),
        );
    }

    // the logarithmic-weight norm of h_1
    let h1 = &fs[0].1;
    let weighted = log_lp_norm_on(
        |y: f64| (1.0 + y.abs().ln().max(0.0)).ln() + h1.eval(y).norm().ln(),
        1.0,
        &Support::Whole,
        1e-12,
    )?
    .exp();
    b.assert_le(
        "log-weight norm of h_1",
        json!({ "reference": LOG_WEIGHT_NORM_H1 }),
        (weighted - LOG_WEIGHT_NORM_H1).abs(),
        1e-8,
        0.0,
    );
    b.evidence("log_weight_norm_h1", weighted);
    b.note("the fitted constant is taken on f = h_1 over the x-grid and reused for every other f");
    Ok(b.finish())
}
