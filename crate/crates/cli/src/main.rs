//! `ou-harmonic`: runs the verification suites and writes machine-readable reports.
//!
//! Exit codes: 0 every asserted and fitted inequality holds, 1 some inequality
//! failed, 2 a numerical routine did not converge, 64 invalid invocation or
//! a configuration rejected by a suite.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ou_harmonic::decomposition::DecompositionParams;
use ou_harmonic::harness::{
    annuli_suite, decomposition_suite, hypercontractivity_suite, kernel_suite, offdiagonal_suite, ondiagonal_suite,
    pi3_pointwise_suite, semigroup_suite, spectral_gap_suite, tent_suite, DecompositionConfig, GeometryConfig,
    HypercontractivityConfig, KernelConfig, OffDiagonalConfig, OnDiagonalConfig, Pi3Config, SemigroupConfig,
    SpectralGapConfig, SuiteReport, TentConfig,
};
use serde_json::json;

/// Version of the JSON report layout.
const SCHEMA_VERSION: &str = "1";
/// Largest Hermite degree of the polynomial banks.
const DEGREE_LIMIT: usize = 16;

const EXIT_FAILURE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "ou-harmonic",
    version,
    about = "Numerical verification of Ornstein-Uhlenbeck harmonic analysis estimates",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification suite.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        options: Options,
    },
    /// Run suites in bulk.
    #[command(allow_negative_numbers = true)]
    Report {
        #[arg(value_enum)]
        scope: Scope,
        #[command(flatten)]
        options: Options,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Semigroup,
    Kernel,
    Hypercontractivity,
    Decomposition,
    Tent,
    /// Annulus geometry, the on-diagonal chain and the off-diagonal decay.
    Annuli,
    SpectralGap,
    Pi3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Options {
    /// Damping δ of the inner semigroup.
    #[arg(long, default_value_t = 1.0 / 128.0)]
    delta: f64,
    /// Damping δ' of the outer semigroup.
    #[arg(long = "delta-prime", default_value_t = 1.0 / 128.0)]
    delta_prime: f64,
    /// Aperture κ of the split `t = m̃(x)/κ`.
    #[arg(long, default_value_t = 4.0)]
    kappa: f64,
    /// Frequencies τ of the imaginary-power profiles (comma separated).
    #[arg(long, value_delimiter = ',')]
    tau: Vec<f64>,
    /// Lebesgue exponents (comma separated); the first one drives the annulus chains.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Window of the semigroup maximal function.
    #[arg(long = "eps-maximal")]
    eps_maximal: Option<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Quadrature tolerance; overrides every selected suite's default.
    #[arg(long)]
    tol: Option<f64>,
    /// Largest degree of the random polynomial banks and of the kernel check.
    #[arg(long = "deg-max")]
    deg_max: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Options {
    fn params(&self) -> DecompositionParams {
        DecompositionParams {
            delta: self.delta,
            delta_prime: self.delta_prime,
            kappa: self.kappa,
            ..DecompositionParams::default()
        }
    }

    /// Every referenced parameter is checked before any suite starts.
    fn validate(&self) -> Result<(), String> {
        self.params().validate().map_err(|e| e.to_string())?;
        if let Some(tau) = self.tau.iter().find(|t| !t.is_finite()) {
            return Err(format!("--tau must be finite, got {tau}"));
        }
        if let Some(p) = self.p.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(format!("--p must be finite and greater than 1, got {p}"));
        }
        if let Some(eps) = self.eps_maximal {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(format!("--eps-maximal must lie in (0, 1], got {eps}"));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(format!("--tol must lie in (0, 1), got {tol}"));
            }
        }
        if let Some(d) = self.deg_max {
            if !(1..=DEGREE_LIMIT).contains(&d) {
                return Err(format!("--deg-max must lie in 1..={DEGREE_LIMIT}, got {d}"));
            }
        }
        Ok(())
    }
}

fn run_suite(suite: Suite, o: &Options) -> ou_harmonic::Result<Vec<SuiteReport>> {
    let params = o.params();
    let first_p = o.p.first().copied();
    let reports = match suite {
        Suite::Semigroup => {
            let mut c = SemigroupConfig {
                seed: o.seed,
                ..Default::default()
            };
            if !o.p.is_empty() {
                c.p_list = o.p.clone();
            }
            if let Some(eps) = o.eps_maximal {
                c.eps_maximal = eps;
            }
            c.tol = o.tol.unwrap_or(c.tol);
            c.degree_max = o.deg_max.unwrap_or(c.degree_max);
            vec![semigroup_suite(&c)?]
        }
        Suite::Kernel => {
            let mut c = KernelConfig {
                seed: o.seed,
                ..Default::default()
            };
            c.tol = o.tol.unwrap_or(c.tol);
            c.degree_max = o.deg_max.unwrap_or(c.degree_max);
            vec![kernel_suite(&c)?]
        }
        Suite::Hypercontractivity => {
            let mut c = HypercontractivityConfig {
                seed: o.seed,
                ..Default::default()
            };
            if !o.p.is_empty() {
                c.p_list = o.p.clone();
            }
            c.tol = o.tol.unwrap_or(c.tol);
            c.degree_max = o.deg_max.unwrap_or(c.degree_max);
            vec![hypercontractivity_suite(&c)?]
        }
        Suite::SpectralGap => {
            let mut c = SpectralGapConfig {
                seed: o.seed,
                ..Default::default()
            };
            if !o.p.is_empty() {
                c.p_list = o.p.clone();
            }
            c.tol = o.tol.unwrap_or(c.tol);
            c.degree_max = o.deg_max.unwrap_or(c.degree_max);
            vec![spectral_gap_suite(&c)?]
        }
        Suite::Annuli => {
            let geometry = GeometryConfig {
                seed: o.seed,
                ..Default::default()
            };
            let mut on = OnDiagonalConfig {
                params,
                seed: o.seed,
                ..Default::default()
            };
            on.p = first_p.unwrap_or(on.p);
            on.tol = o.tol.unwrap_or(on.tol);
            on.degree_max = o.deg_max.unwrap_or(on.degree_max);
            let mut off = OffDiagonalConfig {
                params,
                seed: o.seed,
                ..Default::default()
            };
            off.p = first_p.unwrap_or(off.p);
            off.tol = o.tol.unwrap_or(off.tol);
            off.degree_max = o.deg_max.unwrap_or(off.degree_max);
            vec![
                annuli_suite(&geometry)?,
                ondiagonal_suite(&on)?,
                offdiagonal_suite(&off)?,
            ]
        }
        Suite::Pi3 => {
            let mut c = Pi3Config {
                params,
                seed: o.seed,
                ..Default::default()
            };
            if !o.tau.is_empty() {
                c.tau_list = o.tau.clone();
            }
            c.tol = o.tol.unwrap_or(c.tol);
            c.degree_max = o.deg_max.unwrap_or(c.degree_max);
            vec![pi3_pointwise_suite(&c)?]
        }
        Suite::Decomposition => {
            let mut c = DecompositionConfig {
                params,
                ..Default::default()
            };
            if !o.tau.is_empty() {
                c.tau_list = o.tau.clone();
            }
            if let Some(tol) = o.tol {
                c.params.t_tol = tol;
            }
            vec![decomposition_suite(&c)?]
        }
        Suite::Tent => {
            let mut c = TentConfig {
                params,
                ..Default::default()
            };
            c.tol = o.tol.unwrap_or(c.tol);
            vec![tent_suite(&c)?]
        }
    };
    Ok(reports)
}

/// Suites whose results depend on `δ`, `δ'`, `κ`.
fn uses_params(suite: Suite) -> bool {
    matches!(suite, Suite::Annuli | Suite::Pi3 | Suite::Decomposition | Suite::Tent)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per case: `suite,label,kind,value,bound,slack,ratio,pass`.
fn to_csv(reports: &[SuiteReport]) -> String {
    let mut out = String::from("suite,label,kind,value,bound,slack,ratio,pass\n");
    for r in reports {
        for c in &r.cases {
            let kind = serde_json::to_value(c.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e},{}",
                csv_field(&r.suite),
                csv_field(&c.label),
                kind,
                c.value,
                c.bound,
                c.slack,
                c.ratio,
                c.pass
            );
        }
    }
    out
}

fn render(reports: &[SuiteReport], violations: &[String], format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "constraint_violations": violations,
                "reports": reports,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => to_csv(reports),
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (suites, options) = match &cli.command {
        Command::Verify { suite, options } => (vec![*suite], options),
        Command::Report {
            scope: Scope::All,
            options,
        } => (
            vec![
                Suite::Semigroup,
                Suite::Kernel,
                Suite::Hypercontractivity,
                Suite::SpectralGap,
                Suite::Annuli,
                Suite::Pi3,
                Suite::Decomposition,
                Suite::Tent,
            ],
            options,
        ),
    };
    if let Err(msg) = options.validate() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }

    let violations = if suites.iter().copied().any(uses_params) {
        options.params().constraint_violations()
    } else {
        Vec::new()
    };
    for v in &violations {
        eprintln!("warning: {v}; running anyway");
    }

    let mut reports = Vec::new();
    for &suite in &suites {
        match run_suite(suite, options) {
            Ok(r) => reports.extend(r),
            Err(e) => {
                eprintln!("error: {e}");
                // anything but a numerical failure is a configuration the suite rejects
                return ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE });
            }
        }
    }

    let text = match render(&reports, &violations, options.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(e) = emit(&text, options.out.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_FAILURE);
    }
    for r in &reports {
        let s = &r.summary;
        eprintln!(
            "{}: {} ({} ok, {} failed, worst ratio {:.3e})",
            r.suite,
            if s.pass { "PASS" } else { "FAIL" },
            s.pass_count,
            s.fail_count,
            s.worst_ratio
        );
    }
    if reports.iter().all(SuiteReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
