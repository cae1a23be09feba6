//! The structured result of a verification suite.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// How a case's pass flag is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// An inequality with an exact constant; failing it is a failure.
    Asserted,
    /// An inequality whose constant was fitted once on a designated anchor
    /// case and then reused; failing it is a failure.
    Fitted,
    /// Evidence only; never fails.
    Reported,
}

/// One checked inequality `value <= bound + slack`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub label: String,
    pub kind: CaseKind,
    pub inputs: Value,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    /// `value / bound` (`value / slack` when the bound is zero, `exp(value - bound)`
    /// for cases on the log scale).
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// No asserted or fitted case failed.
    pub pass: bool,
    pub pass_count: usize,
    pub fail_count: usize,
    /// Largest ratio among asserted and fitted cases.
    pub worst_ratio: f64,
    pub fitted_constants: BTreeMap<String, f64>,
    pub evidence: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: BTreeMap<String, Value>,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.pass
    }

    /// Cases that failed.
    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

/// Incremental construction of a [`SuiteReport`].
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    suite: String,
    config: BTreeMap<String, Value>,
    cases: Vec<Case>,
    fitted: BTreeMap<String, f64>,
    evidence: BTreeMap<String, Value>,
    notes: Vec<String>,
}

fn to_value<S: Serialize>(v: S) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

impl ReportBuilder {
    pub fn new(suite: impl Into<String>) -> Self {
        ReportBuilder {
            suite: suite.into(),
            config: BTreeMap::new(),
            cases: Vec::new(),
            fitted: BTreeMap::new(),
            evidence: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn config<S: Serialize>(&mut self, key: &str, value: S) -> &mut Self {
        self.config.insert(key.to_string(), to_value(value));
        self
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        kind: CaseKind,
        label: String,
        inputs: Value,
        value: f64,
        bound: f64,
        slack: f64,
        log_scale: bool,
    ) {
        // a zero bound is measured against the slack instead
        let scale = if bound != 0.0 { bound } else { slack };
        let ratio = if log_scale {
            (value - bound).exp()
        } else if scale != 0.0 {
            value / scale
        } else if value <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let holds = value <= bound + slack;
        let pass = kind == CaseKind::Reported || holds;
        self.cases.push(Case {
            label,
            kind,
            inputs,
            value,
            bound,
            slack,
            ratio,
            pass,
        });
    }

    /// An exact-constant inequality `value <= bound + slack`.
    pub fn assert_le(&mut self, label: impl Into<String>, inputs: Value, value: f64, bound: f64, slack: f64) {
        self.push(CaseKind::Asserted, label.into(), inputs, value, bound, slack, false);
    }

    /// An exact-constant inequality between logarithms, `ln value <= ln bound + slack`.
    pub fn assert_log_le(&mut self, label: impl Into<String>, inputs: Value, ln_value: f64, ln_bound: f64, slack: f64) {
        self.push(
            CaseKind::Asserted,
            label.into(),
            inputs,
            ln_value,
            ln_bound,
            slack,
            true,
        );
    }

    /// A fitted-constant inequality `value <= bound + slack`.
    pub fn fitted_le(&mut self, label: impl Into<String>, inputs: Value, value: f64, bound: f64, slack: f64) {
        self.push(CaseKind::Fitted, label.into(), inputs, value, bound, slack, false);
    }

    /// A fitted-constant inequality between logarithms, `ln value <= ln bound + slack`.
    pub fn fitted_log_le(&mut self, label: impl Into<String>, inputs: Value, ln_value: f64, ln_bound: f64, slack: f64) {
        self.push(CaseKind::Fitted, label.into(), inputs, ln_value, ln_bound, slack, true);
    }

    /// Evidence: the value is recorded against a reference, never failing.
    pub fn report(&mut self, label: impl Into<String>, inputs: Value, value: f64, reference: f64) {
        self.push(CaseKind::Reported, label.into(), inputs, value, reference, 0.0, false);
    }

    pub fn fitted_constant(&mut self, name: &str, value: f64) -> &mut Self {
        self.fitted.insert(name.to_string(), value);
        self
    }

    pub fn evidence<S: Serialize>(&mut self, key: &str, value: S) -> &mut Self {
        self.evidence.insert(key.to_string(), to_value(value));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn finish(self) -> SuiteReport {
        let checked = || self.cases.iter().filter(|c| c.kind != CaseKind::Reported);
        let pass_count = checked().filter(|c| c.pass).count();
        let fail_count = checked().filter(|c| !c.pass).count();
        let worst_ratio = checked().map(|c| c.ratio).fold(0.0, f64::max);
        SuiteReport {
            summary: Summary {
                pass: fail_count == 0,
                pass_count,
                fail_count,
                worst_ratio,
                fitted_constants: self.fitted,
                evidence: self.evidence,
                notes: self.notes,
            },
            suite: self.suite,
            config: self.config,
            cases: self.cases,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pass_flag_follows_slack() {
        let mut b = ReportBuilder::new("t");
        b.assert_le("ok", json!({}), 1.0 + 1e-12, 1.0, 1e-9);
        b.assert_le("bad", json!({}), 1.1, 1.0, 1e-9);
        b.report("evidence", json!({}), 5.0, 1.0);
        b.fitted_log_le("log", json!({}), -10.0, -9.0, 0.0);
        let r = b.finish();
        assert_eq!((r.summary.pass_count, r.summary.fail_count), (2, 1));
        assert!(!r.passed());
        assert!((r.cases[3].ratio - (-1f64).exp()).abs() < 1e-15);
        assert!((r.summary.worst_ratio - 1.1).abs() < 1e-15);
    }
}
