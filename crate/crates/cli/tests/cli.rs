use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ou-harmonic"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn report(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout should be a JSON report")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn invalid_invocations_exit_64() {
    for args in [
        &["verify", "nonsense"][..],
        &["verify"],
        &["verify", "kernel", "--format", "xml"],
        &["verify", "kernel", "--delta", "-1"],
        &["verify", "kernel", "--deg-max", "40"],
        &["verify", "semigroup", "--eps-maximal", "2"],
        &["verify", "hypercontractivity", "--p", "0.5"],
        &["report", "everything"],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(64),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty(), "{args:?} should not write a report");
    }
}

#[test]
fn kernel_report_has_the_documented_schema() {
    let out = run(&["verify", "kernel"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["schema_version"], "1");
    let r = &doc["reports"][0];
    assert_eq!(r["suite"], "kernel");
    assert!(r["config"].is_object());
    assert!(r["cases"].as_array().is_some_and(|c| !c.is_empty()));
    assert_eq!(r["summary"]["pass"], true);
    assert!(r["summary"]["worst_ratio"].is_number());
    assert!(r["summary"]["fitted_constants"].is_object());
}

#[test]
fn hypercontractivity_at_p2_has_no_violations() {
    let out = run(&["verify", "hypercontractivity", "--seed", "7", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["reports"][0];
    assert_eq!(r["summary"]["fail_count"], 0);
    assert_eq!(r["config"]["p_list"], serde_json::json!([2.0]));
}

#[test]
fn decomposition_records_residual_and_warns_on_large_damping() {
    let out = run(&["verify", "decomposition", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["reports"][0];
    let residuals: Vec<f64> = r["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["label"].as_str().unwrap().starts_with("residual"))
        .map(|c| c["value"].as_f64().unwrap())
        .collect();
    assert_eq!(residuals.len(), 9);
    assert!(residuals.iter().all(|&v| v <= 1e-5));

    let out = run(&["verify", "decomposition", "--delta", "0.5", "--delta-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "suites still run outside the hypotheses");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("warning: delta' = 0.5 violates delta' < 4^-3"),
        "{stderr}"
    );
    let doc = report(&out);
    let flags = doc["reports"][0]["config"]["constraint_violations"]
        .as_array()
        .unwrap()
        .clone();
    assert!(flags.iter().any(|f| f.as_str().unwrap().contains("delta' = 0.5")));
    assert_eq!(doc["constraint_violations"].as_array().unwrap().len(), flags.len());
}

#[test]
fn csv_output_to_file_flattens_cases() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("kernel.csv");
    let out = run(&["verify", "kernel", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,label,kind,value,bound,slack,ratio,pass"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("kernel,") && r.ends_with(",true")));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = run(&["verify", "spectral-gap", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn non_power_of_four_kappa_warns_and_runs() {
    let out = run(&["verify", "pi3", "--kappa", "8"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kappa = 8 is not a power of 4"), "{stderr}");
    assert_eq!(out.status.code(), Some(0), "{stderr}");
}

#[test]
fn unreachable_tolerance_exits_2() {
    let out = run(&["verify", "kernel", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
    assert!(out.stdout.is_empty());
}
