//! Scenario documents: what to build and which checks to run on it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use nlpb_core::space::{make_epsilon, EpsilonKind, EpsilonSequence, TruncatedSpace};

use crate::catalog::{self, Param};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSpec {
    pub kind: EpsilonKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszSpec {
    pub cond_target: f64,
    pub seed: u64,
}

/// `"identity"` or a generated Riesz map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "serde_json::Value")]
pub enum PairSpec {
    Identity(IdentityTag),
    Riesz(RieszSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityTag {
    Identity,
}

impl TryFrom<serde_json::Value> for PairSpec {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) if s == "identity" => Ok(PairSpec::Identity(IdentityTag::Identity)),
            serde_json::Value::String(s) => Err(format!("riesz: expected \"identity\" or an object, got \"{s}\"")),
            other => serde_json::from_value(other)
                .map(PairSpec::Riesz)
                .map_err(|e| format!("riesz: {e}")),
        }
    }
}

/// Per-check overrides. Which of them a check accepts is listed in the
/// catalog; anything else is rejected at load time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Real points for the resolvent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Complex points `[re, im]` for the uncertainty inequality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend_base_n: Option<usize>,
    /// Promotes a probe to a gated check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

impl CheckEntry {
    fn set_params(&self) -> Vec<Param> {
        let mut out = Vec::new();
        let mut push = |set: bool, p: Param| {
            if set {
                out.push(p)
            }
        };
        push(self.tolerance.is_some(), Param::Tolerance);
        push(self.trials.is_some(), Param::Trials);
        push(self.k_max.is_some(), Param::KMax);
        push(self.lambdas.is_some(), Param::Lambdas);
        push(self.zs.is_some(), Param::Zs);
        push(self.alpha_max.is_some(), Param::AlphaMax);
        push(self.grid_points.is_some(), Param::GridPoints);
        push(self.radius.is_some(), Param::Radius);
        push(self.threshold.is_some(), Param::Threshold);
        push(self.trend_base_n.is_some(), Param::TrendBaseN);
        push(self.exact.is_some(), Param::Exact);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "serde_json::Value")]
pub enum CheckSpec {
    Id(String),
    Entry(CheckEntry),
}

impl TryFrom<serde_json::Value> for CheckSpec {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) => Ok(CheckSpec::Id(s)),
            other => serde_json::from_value(other)
                .map(CheckSpec::Entry)
                .map_err(|e| format!("check entry: {e}")),
        }
    }
}

impl CheckSpec {
    pub fn entry(&self) -> CheckEntry {
        match self {
            CheckSpec::Id(id) => CheckEntry {
                id: id.clone(),
                ..CheckEntry::default()
            },
            CheckSpec::Entry(e) => e.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub guard: usize,
    pub epsilon: EpsilonSpec,
    pub riesz: PairSpec,
    #[serde(default)]
    pub seed: u64,
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Parses and validates. Every failure here is a configuration error.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        TruncatedSpace::new(self.n, self.guard).map_err(|e| CliError::invalid("n/guard", e))?;
        self.epsilon_sequence()?;
        if let PairSpec::Riesz(r) = &self.riesz {
            if !(r.cond_target.is_finite() && r.cond_target >= 1.0) {
                return Err(CliError::Invalid {
                    key: "riesz.cond_target".into(),
                    message: format!("must be finite and at least 1, got {}", r.cond_target),
                });
            }
        }
        if self.checks.is_empty() {
            return Err(CliError::Invalid {
                key: "checks".into(),
                message: "no checks listed".into(),
            });
        }
        for (i, spec) in self.checks.iter().enumerate() {
            let entry = spec.entry();
            let key = format!("checks[{i}]");
            let info = catalog::lookup(&entry.id).ok_or_else(|| CliError::Invalid {
                key: key.clone(),
                message: format!("unknown check `{}`", entry.id),
            })?;
            for p in entry.set_params() {
                if !info.accepts(p) {
                    return Err(CliError::Invalid {
                        key: format!("{key}.{}", p.key()),
                        message: format!("`{}` does not take `{}`", entry.id, p.key()),
                    });
                }
            }
            if let Some(t) = entry.tolerance {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::Invalid {
                        key: format!("{key}.tolerance"),
                        message: format!("must be positive, got {t}"),
                    });
                }
            }
            if entry.grid_points == Some(0) {
                return Err(CliError::Invalid {
                    key: format!("{key}.grid_points"),
                    message: "must be positive".into(),
                });
            }
        }
        Ok(())
    }

    pub fn epsilon_sequence(&self) -> Result<EpsilonSequence, CliError> {
        make_epsilon(self.epsilon.kind, self.n, self.epsilon.values.as_deref())
            .map_err(|e| CliError::invalid("epsilon", e))
    }

    pub fn entries(&self) -> Vec<CheckEntry> {
        self.checks.iter().map(CheckSpec::entry).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t", "n": 6, "guard": 2,
        "epsilon": {"kind": "linear"},
        "riesz": "identity",
        "checks": ["spectrum", {"id": "nonlinear_cr2", "trials": 3}]
    }"#;

    #[test]
    fn parses_minimal() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(s.riesz, PairSpec::Identity(IdentityTag::Identity));
        assert_eq!(s.entries()[1].trials, Some(3));
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn parses_riesz() {
        let text = MINIMAL.replace("\"identity\"", r#"{"cond_target": 100, "seed": 3}"#);
        let s = Scenario::from_json(&text).unwrap();
        assert_eq!(
            s.riesz,
            PairSpec::Riesz(RieszSpec {
                cond_target: 100.0,
                seed: 3
            })
        );
    }

    #[test]
    fn non_monotone_custom_epsilon_rejected() {
        let text = MINIMAL
            .replace("\"n\": 6", "\"n\": 3")
            .replace(r#"{"kind": "linear"}"#, r#"{"kind": "custom", "values": [0, 1, 1, 2]}"#);
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(matches!(err, CliError::Invalid { ref key, .. } if key == "epsilon"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("\"guard\": 2", "\"guard\": 2, \"gaurd\": 1");
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("gaurd"), "{err}");
    }

    #[test]
    fn unknown_check_rejected() {
        let text = MINIMAL.replace("\"spectrum\"", "\"spectra\"");
        assert!(Scenario::from_json(&text).unwrap_err().to_string().contains("spectra"));
    }

    #[test]
    fn inapplicable_override_rejected() {
        let text = MINIMAL.replace("\"trials\": 3", "\"k_max\": 3");
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("k_max"), "{err}");
    }

    #[test]
    fn guard_must_fit() {
        let text = MINIMAL.replace("\"guard\": 2", "\"guard\": 6");
        assert!(Scenario::from_json(&text).is_err());
    }
}
