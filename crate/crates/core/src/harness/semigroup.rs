//! The Ornstein–Uhlenbeck semigroup: algebra, `L^1` contraction, uniform
//! `tLe^{-tL}` bounds, and the local maximal function.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{collect_ordered, ReportBuilder, SuiteReport, EXACT_SLACK};
use crate::error::{Error, Result};
use crate::gaussian::{admissibility, GaussianContext};
use crate::spectral::{
    apply_symbol, maximal_function, random_polynomials, semigroup, HermiteExpansion, SpectralSymbol,
    DEFAULT_MAXIMAL_EPSILON,
};

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupConfig {
    pub seed: u64,
    /// Size of the `L^1` contraction bank.
    pub bank_size: usize,
    pub degree_max: usize,
    pub t_grid: Vec<f64>,
    /// Exponents of the uniform `tLe^{-tL}` bound.
    pub p_list: Vec<f64>,
    /// Lower-end factor `ε` of the maximal-function window.
    pub eps_maximal: f64,
    pub tol: f64,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        SemigroupConfig {
            seed: 7,
            bank_size: 500,
            degree_max: 8,
            t_grid: super::log_grid(0.01, 3.0, 6),
            p_list: vec![1.25, 1.5, 2.0],
            eps_maximal: DEFAULT_MAXIMAL_EPSILON,
            tol: 1e-11,
        }
    }
}

/// Tolerance of the coefficient identities (semigroup law, composition).
const ALGEBRA_TOL: f64 = 1e-12;
/// Polynomials used by the algebra, `tLe^{-tL}` and maximal-function checks.
const SMALL_BANK: usize = 20;
const MAXIMAL_POINTS: [f64; 5] = [-2.0, -0.5, 0.0, 1.0, 3.0];

pub fn semigroup_suite(config: &SemigroupConfig) -> Result<SuiteReport> {
    if !(config.eps_maximal > 0.0 && config.eps_maximal <= 1.0) {
        return Err(Error::invalid("maximal-function epsilon must lie in (0, 1]"));
    }
    let ctx = GaussianContext::default();
    let bank = random_polynomials(config.seed, config.bank_size, config.degree_max, false, ctx)?;
    let small = &bank[..SMALL_BANK.min(bank.len())];
    let tol = config.tol;
    let mut b = ReportBuilder::new("semigroup");
    b.config("seed", config.seed)
        .config("bank_size", config.bank_size)
        .config("degree_max", config.degree_max)
        .config("t_grid", &config.t_grid)
        .config("p_list", &config.p_list)
        .config("eps_maximal", config.eps_maximal)
        .config("tol", tol);

    // algebra: e^{-sL} e^{-tL} = e^{-(s+t)L}, symbols compose pointwise
    let mut law = 0.0f64;
    let mut composition = 0.0f64;
    let mut mean_shift = 0.0f64;
    for f in small {
        let scale = f.l2_norm();
        for &s in &config.t_grid {
            for &t in &config.t_grid {
                let two_step = semigroup(&semigroup(f, s)?, t)?;
                law = law.max(two_step.coefficient_distance(&semigroup(f, s + t)?) / scale);
                let joint = apply_symbol(f, &SpectralSymbol::heat(s).then(&SpectralSymbol::t_l_heat(t)));
                let nested = apply_symbol(&apply_symbol(f, &SpectralSymbol::t_l_heat(t)), &SpectralSymbol::heat(s));
                composition = composition.max(joint.coefficient_distance(&nested) / scale);
            }
            mean_shift = mean_shift.max((semigroup(f, s)?.mean() - f.mean()).norm());
        }
    }
    let n_small = small.len();
    b.assert_le(
        "semigroup law",
        json!({ "polynomials": n_small }),
        law,
        ALGEBRA_TOL,
        0.0,
    );
    b.assert_le(
        "symbol composition",
        json!({ "polynomials": n_small }),
        composition,
        ALGEBRA_TOL,
        0.0,
    );
    b.assert_le(
        "mean preservation",
        json!({ "polynomials": n_small }),
        mean_shift,
        0.0,
        0.0,
    );

    // L^1 contraction over the whole bank
    let l1: Vec<f64> = collect_ordered(bank.par_iter().map(|f| f.lp_norm(1.0, tol)).collect())?;
    let worst: Vec<(f64, usize)> = collect_ordered(
        config
            .t_grid
            .par_iter()
            .map(|&t| {
                let mut best = (0.0f64, 0usize);
                for (i, f) in bank.iter().enumerate() {
                    let r = semigroup(f, t)?.lp_norm(1.0, tol)? / l1[i];
                    if r > best.0 {
                        best = (r, i);
                    }
                }
                Ok(best)
            })
            .collect(),
    )?;
    for (&t, &(r, at)) in config.t_grid.iter().zip(&worst) {
        b.assert_le(
            format!("L1 contraction t={t:.4}"),
            json!({ "t": t, "bank_size": bank.len(), "worst_trial": at }),
            r,
            1.0,
            EXACT_SLACK,
        );
    }

    // sup_t ‖tLe^{-tL} f‖_p / ‖f‖_p, reported per p
    for &p in &config.p_list {
        let ratios: Vec<f64> = collect_ordered(
            small
                .par_iter()
                .map(|f| {
                    let base = f.lp_norm(p, tol)?;
                    let mut best = 0.0f64;
                    for &t in &config.t_grid {
                        best = best.max(apply_symbol(f, &SpectralSymbol::t_l_heat(t)).lp_norm(p, tol)? / base);
                    }
                    Ok(best)
                })
                .collect(),
        )?;
        let c = ratios.iter().copied().fold(0.0f64, f64::max);
        b.fitted_constant(&format!("sup_tLe^-tL(p={p})"), c);
        b.report(
            format!("uniform tLe^-tL bound p={p}"),
            json!({ "p": p, "polynomials": n_small }),
            c,
            1.0,
        );
    }

    // maximal function
    let h0 = HermiteExpansion::basis(0, ctx)?;
    let h1 = HermiteExpansion::basis(1, ctx)?;
    let m0 = maximal_function(&h0, 0.3, config.eps_maximal)?;
    b.assert_le(
        "maximal function of h_0",
        json!({ "x": 0.3 }),
        (m0 - 1.0).abs(),
        1e-12,
        0.0,
    );
    // x = 1: m(1) = 1, the supremum sits at the left end t = ε
    let m1 = maximal_function(&h1, 1.0, 0.01)?;
    let expected = (-0.01f64).exp() * 2f64.sqrt();
    b.assert_le(
        "maximal function of h_1 at x=1, eps=0.01",
        json!({ "x": 1.0, "epsilon": 0.01, "expected": expected }),
        (m1 - expected).abs(),
        1e-9,
        0.0,
    );
    let mut deficit = 0.0f64;
    let mut scale = 0.0f64;
    for f in small {
        for &x in &MAXIMAL_POINTS {
            let m = maximal_function(f, x, config.eps_maximal)?;
            let lo = config.eps_maximal * admissibility(x).powi(2);
            let ends = semigroup(f, lo)?.eval(x).norm().max(semigroup(f, 1.0)?.eval(x).norm());
            deficit = deficit.max(ends - m);
            scale = scale.max(ends);
        }
    }
    b.assert_le(
        "maximal function dominates the window ends",
        json!({ "polynomials": n_small, "x": MAXIMAL_POINTS }),
        deficit,
        0.0,
        EXACT_SLACK * scale,
    );
    Ok(b.finish())
}
