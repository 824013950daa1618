use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Inputs that produced a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cond: Option<f64>,
}

/// Named residuals against one tolerance.
///
/// `passed` holds iff every entry of `residuals` is `<= tolerance`; NaN fails.
/// `diagnostics` carries informational values that never gate the verdict
/// (truncation losses, measured growth rates, trend data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default)]
    pub context: Fingerprint,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residuals: BTreeMap::new(),
            tolerance,
            passed: true,
            diagnostics: BTreeMap::new(),
            witness: None,
            context: Fingerprint::default(),
        }
    }

    /// Records `value` under `key`, keeping the worst value seen so far.
    pub fn record(&mut self, key: &str, value: f64) {
        let entry = self.residuals.entry(key.to_string()).or_insert(0.0);
        if value.is_nan() || value > *entry {
            *entry = value;
        }
        self.passed = self.evaluate();
    }

    /// Like [`record`](Self::record) but remembers `witness` when `value`
    /// becomes the overall worst residual beyond tolerance.
    pub fn record_with_witness(&mut self, key: &str, value: f64, witness: impl FnOnce() -> String) {
        let worst = self.worst();
        self.record(key, value);
        if !(value <= self.tolerance) && !(value <= worst) {
            self.witness = Some(witness());
        }
    }

    pub fn diagnostic(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }

    pub fn with_context(mut self, context: Fingerprint) -> Self {
        self.context = context;
        self
    }

    pub fn residual(&self, key: &str) -> Option<f64> {
        self.residuals.get(key).copied()
    }

    /// Largest residual, `0` for an empty report; NaN propagates.
    pub fn worst(&self) -> f64 {
        self.residuals
            .values()
            .fold(0.0, |acc, &v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
    }

    fn evaluate(&self) -> bool {
        self.residuals.values().all(|&v| v <= self.tolerance)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<28} worst {:>10.3e}  tol {:>9.2e}",
            self.name,
            self.worst(),
            self.tolerance
        )
    }
}
