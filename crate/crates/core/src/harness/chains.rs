//! The on-diagonal annulus chain: time partition, Hölder step and
//! hypercontractive chain on `C_k`, and the decay of the Hölder factor.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    collect_ordered, ladder_exponent, ladder_length, ladder_partition, ReportBuilder, SuiteReport, EXACT_SLACK,
};
use crate::decomposition::{is_power_of_four, DecompositionParams};
use crate::error::{Error, Result};
use crate::gaussian::{annulus_log_measure, log_lp_norm_on, Annulus, GaussianContext, Support};
use crate::mehler::{kernel_apply_generator_scaled, kernel_apply_scaled, TruncatedPolynomial};
use crate::spectral::{random_polynomials, HermiteExpansion};

#[derive(Debug, Clone, Serialize)]
pub struct OnDiagonalConfig {
    pub params: DecompositionParams,
    pub p: f64,
    /// Largest annulus of the Hölder step and of the decay fit.
    pub k_max: u32,
    /// Largest annulus of the partition identity.
    pub partition_k_max: u32,
    /// Values of `κ` for which the partition identity is checked.
    pub partition_kappas: Vec<f64>,
    /// Largest annulus of the kernel-path chain and of the `α` evidence.
    pub chain_k_max: u32,
    pub seed: u64,
    pub bank_size: usize,
    pub degree_max: usize,
    /// Number of bank polynomials pushed through the kernel path (after `h_1`).
    pub chain_bank: usize,
    pub tol: f64,
}

impl Default for OnDiagonalConfig {
    fn default() -> Self {
        OnDiagonalConfig {
            params: DecompositionParams::default(),
            p: 1.5,
            k_max: 6,
            partition_k_max: 8,
            partition_kappas: vec![4.0, 16.0],
            chain_k_max: 4,
            seed: 7,
            bank_size: 20,
            degree_max: 8,
            chain_bank: 2,
            tol: 1e-10,
        }
    }
}

/// Which operator the kernel path applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KernelAction {
    /// `e^{-sL}`
    Semigroup,
    /// `L e^{-sL}`
    Generator,
}

/// `ln ‖1_target · A_s g‖_p` with `A_s` applied through the Mehler kernel.
pub(crate) fn log_norm_of_image(
    g: &TruncatedPolynomial<f64>,
    action: KernelAction,
    s: f64,
    target: &Support<f64>,
    p: f64,
    tol: f64,
) -> Result<f64> {
    let failure = RefCell::new(None);
    let inner_tol = tol / 10.0;
    let value = log_lp_norm_on(
        |x: f64| {
            let v = match action {
                KernelAction::Semigroup => kernel_apply_scaled(g, s, x, inner_tol),
                KernelAction::Generator => kernel_apply_generator_scaled(g, s, x, inner_tol),
            };
            match v {
                Ok(v) => v.ln_abs(),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        p,
        target,
        tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => value,
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Ladder cells `(k, j)` with `k <= k_max`, `j <= N(k)`.
fn ladder(kappa: f64, k_max: u32) -> Result<Vec<(u32, u32)>> {
    let mut cells = Vec::new();
    for k in 0..=k_max {
        for j in 0..=ladder_length(kappa, k)? {
            cells.push((k, j));
        }
    }
    Ok(cells)
}

/// (a) the partition identity, (b) the Hölder step on `C_k` for the bank,
/// (c) the kernel-path chain `‖1_{C_k} e^{-(δ'+δ)tL}(1_{C_k*} f)‖_p <=
/// γ(C_k)^{1/p - 1/q(k,j)} ‖1_{C_k*} f‖_p` at `t = 4^{-k+j}/κ^2`, (d) the fit
/// `γ(C_k)^{1/p - 1/q(k,j)} <= A e^{-c 4^j}` and the exponent gap, and the
/// `j^{-α}` evidence for the `p = 1` chain.
pub fn ondiagonal_suite(config: &OnDiagonalConfig) -> Result<SuiteReport> {
    let params = &config.params;
    params.validate()?;
    let p = config.p;
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::invalid(format!("on-diagonal exponent lies in (1, 2], got {p}")));
    }
    let mut b = ReportBuilder::new("ondiagonal");
    b.config("params", params)
        .config("p", p)
        .config("k_max", config.k_max)
        .config("partition_k_max", config.partition_k_max)
        .config("partition_kappas", &config.partition_kappas)
        .config("chain_k_max", config.chain_k_max)
        .config("seed", config.seed)
        .config("bank_size", config.bank_size)
        .config("degree_max", config.degree_max)
        .config("chain_bank", config.chain_bank)
        .config("tol", config.tol)
        .config("slack", EXACT_SLACK);

    // (a) partition identity, exact in floating point for powers of 4
    for &kappa in &config.partition_kappas {
        for k in 0..=config.partition_k_max {
            let v = ladder_partition(kappa, k)?;
            b.assert_le(
                format!("partition kappa={kappa} k={k}"),
                json!({ "kappa": kappa, "k": k, "N": ladder_length(kappa, k)? }),
                (v - 1.0).abs(),
                0.0,
                0.0,
            );
        }
    }
    let kappa = params.kappa;
    if !is_power_of_four(kappa) {
        b.note(format!(
            "kappa = {kappa} is not a power of 4: the ladder N(k) is undefined, chains skipped"
        ));
        return Ok(b.finish());
    }

    let ctx = GaussianContext::default();
    let bank = random_polynomials(config.seed, config.bank_size, config.degree_max, false, ctx)?;
    let tol = config.tol;
    let damping = params.damping_sum();
    let gap = |k: u32, j: u32| -> Result<f64> { Ok(1.0 / p - 1.0 / ladder_exponent(p, damping, kappa, k, j)?) };

    // (b) Hölder step: ln ‖1_{C_k} g‖_p <= (1/p - 1/q) ln γ(C_k) + ln ‖g‖_q
    let cells = ladder(kappa, config.k_max)?;
    let restricted: Vec<Vec<f64>> = collect_ordered(
        (0..=config.k_max)
            .into_par_iter()
            .map(|k| {
                let region = Annulus::plain(k).support();
                bank.iter()
                    .map(|g| g.log_lp_norm_on(p, &region, tol))
                    .collect::<Result<Vec<_>>>()
            })
            .collect(),
    )?;
    let holder: Vec<(f64, f64, usize)> = collect_ordered(
        cells
            .par_iter()
            .map(|&(k, j)| {
                let q = ladder_exponent(p, damping, kappa, k, j)?;
                let factor = gap(k, j)? * annulus_log_measure::<f64>(&Annulus::plain(k));
                // worst margin ln lhs - ln rhs over the bank
                let mut worst = (f64::NEG_INFINITY, 0.0, 0usize);
                for (i, g) in bank.iter().enumerate() {
                    let rhs = factor + g.log_lp_norm_on(q, &Support::Whole, tol)?;
                    let lhs = restricted[k as usize][i];
                    if lhs - rhs > worst.0 - worst.1 {
                        worst = (lhs, rhs, i);
                    }
                }
                Ok(worst)
            })
            .collect(),
    )?;
    for (&(k, j), &(lhs, rhs, at)) in cells.iter().zip(&holder) {
        b.assert_log_le(
            format!("holder step k={k} j={j}"),
            json!({ "k": k, "j": j, "q": ladder_exponent(p, damping, kappa, k, j)?, "bank_size": bank.len(), "worst_trial": at }),
            lhs,
            rhs,
            EXACT_SLACK,
        );
    }

    // (c) kernel-path chain on a small bank led by h_1
    let mut chain_fs = vec![HermiteExpansion::basis(1, ctx)?];
    chain_fs.extend(bank.iter().take(config.chain_bank).cloned());
    let chain_cells = ladder(kappa, config.chain_k_max.min(config.k_max))?;
    let chain_jobs: Vec<(u32, u32, usize)> = chain_cells
        .iter()
        .flat_map(|&(k, j)| (0..chain_fs.len()).map(move |i| (k, j, i)))
        .collect();
    let chains: Vec<(f64, f64)> = collect_ordered(
        chain_jobs
            .par_iter()
            .map(|&(k, j, i)| {
                let source = Annulus::starred(k).support();
                let g = TruncatedPolynomial::new(chain_fs[i].clone(), source);
                let s = damping * 4f64.powi(j as i32 - k as i32) / (kappa * kappa);
                let lhs = log_norm_of_image(&g, KernelAction::Semigroup, s, &Annulus::plain(k).support(), p, tol)?;
                let rhs = gap(k, j)? * annulus_log_measure::<f64>(&Annulus::plain(k))
                    + chain_fs[i].log_lp_norm_on(p, &source, tol)?;
                Ok((lhs, rhs))
            })
            .collect(),
    )?;
    for (&(k, j, i), &(lhs, rhs)) in chain_jobs.iter().zip(&chains) {
        let f = if i == 0 {
            "h_1".to_string()
        } else {
            format!("bank[{}]", i - 1)
        };
        b.assert_log_le(
            format!("chain k={k} j={j} f={f}"),
            json!({ "k": k, "j": j, "f": f, "t": 4f64.powi(j as i32 - k as i32) / (kappa * kappa) }),
            lhs,
            rhs,
            EXACT_SLACK,
        );
    }

    // (d) decay of the Hölder factor in j, and the exponent gap
    let mut decay = Vec::new();
    let mut gap_constant = f64::INFINITY;
    for &(k, j) in &cells {
        let g = gap(k, j)?;
        decay.push((4f64.powi(j as i32), g * annulus_log_measure::<f64>(&Annulus::plain(k))));
        gap_constant = gap_constant.min(g / 4f64.powi(j as i32 - k as i32));
    }
    let (slope, _) = least_squares(&decay);
    let c = -slope;
    let ln_a = decay.iter().map(|&(x, y)| y + c * x).fold(f64::NEG_INFINITY, f64::max);
    b.fitted_constant("c_holder_decay", c)
        .fitted_constant("A_holder_decay", ln_a.exp())
        .fitted_constant("c_exponent_gap", gap_constant);
    b.assert_le("holder decay rate c > 0", json!({ "cells": cells.len() }), -c, 0.0, 0.0);
    b.assert_le(
        "exponent gap c' > 0",
        json!({ "cells": cells.len() }),
        -gap_constant,
        0.0,
        0.0,
    );

    // j^{-α} evidence: p = 1, undamped times t = 4^{-k+j}
    let probe = &chain_fs[0];
    let mut alphas = Vec::new();
    for k in 1..=config.chain_k_max {
        let n = ladder_length(kappa, k)?;
        if n < 2 {
            continue;
        }
        let source = Annulus::starred(k).support();
        let g = TruncatedPolynomial::new(probe.clone(), source);
        let base = probe.log_lp_norm_on(1.0, &source, tol)?;
        let points: Vec<(f64, f64)> = collect_ordered(
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let t = 4f64.powi(j as i32 - k as i32);
                    let l = log_norm_of_image(&g, KernelAction::Semigroup, t, &Annulus::plain(k).support(), 1.0, tol)?;
                    Ok(((j as f64).ln(), l - base))
                })
                .collect(),
        )?;
        let (slope, _) = least_squares(&points);
        alphas.push(json!({ "k": k, "alpha": -slope, "ln_ratios": points.iter().map(|p| p.1).collect::<Vec<_>>() }));
    }
    b.evidence("chain_alpha_p1_h1", alphas);
    b.note("the j^-alpha hypothesis is evidence only; nothing about alpha is asserted");
    Ok(b.finish())
}
