//! Helpers shared by the CLI integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const SHIPPED: [&str; 2] = ["linear_boson", "quadratic_riesz"];

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn scenario_path(name: &str) -> PathBuf {
    workspace_root().join("scenarios").join(format!("{name}.json"))
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn nlpb(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_nlpb"))
        .args(args)
        .output()
        .expect("spawn nlpb");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Runs a scenario through the binary and returns `(exit code, report text
/// without the timing block)`.
pub fn run_to_file(scenario: &Path, dir: &Path, tag: &str) -> (i32, String) {
    let out = dir.join(format!("{tag}.json"));
    let o = nlpb(&["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let stripped = match serde_json::from_str::<Value>(&text) {
        Ok(mut v) => {
            if let Value::Object(m) = &mut v {
                m.remove("timing");
            }
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Err(_) => String::new(),
    };
    (o.code, stripped)
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a.abs() <= 1e-9 && b.abs() <= 1e-9) || (a - b).abs() <= 1e-6 * a.abs().max(b.abs())
}

/// Structural equality with floats compared to 1e-6 relative (values below
/// 1e-9 count as round-off and compare equal).
pub fn matches_golden(actual: &Value, golden: &Value, path: &str) -> Result<(), String> {
    match (actual, golden) {
        (Value::Number(a), Value::Number(b)) => {
            let (x, y) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            if close(x, y) {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(format!("{path}: length {} != {}", a.len(), b.len()));
            }
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                matches_golden(x, y, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (Value::Object(a), Value::Object(b)) => {
            let ka: Vec<_> = a.keys().collect();
            let kb: Vec<_> = b.keys().collect();
            if ka != kb {
                return Err(format!("{path}: keys {ka:?} != {kb:?}"));
            }
            for (k, v) in a {
                matches_golden(v, &b[k], &format!("{path}.{k}"))?;
            }
            Ok(())
        }
        (a, b) if a == b => Ok(()),
        (a, b) => Err(format!("{path}: {a} != {b}")),
    }
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, body).unwrap();
    p
}

/// Determinism, golden agreement and exit codes; one summary line.
pub fn cli_determinism_and_exit_codes() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut problems = Vec::new();

    for name in SHIPPED {
        let path = scenario_path(name);
        let (code_a, a) = run_to_file(&path, dir.path(), &format!("{name}_a"));
        let (code_b, b) = run_to_file(&path, dir.path(), &format!("{name}_b"));
        if code_a != 0 || code_b != 0 {
            problems.push(format!("{name}: exit codes {code_a}, {code_b}"));
        }
        if a.is_empty() || a != b {
            problems.push(format!("{name}: repeated runs differ"));
        }
        match std::fs::read_to_string(golden_path(name)) {
            Ok(g) => {
                let golden: Value = serde_json::from_str(&g).map_err(|e| e.to_string())?;
                let actual: Value = serde_json::from_str(&a).map_err(|e| format!("{name}: {e}"))?;
                if let Err(e) = matches_golden(&actual, &golden, name) {
                    problems.push(format!("golden mismatch at {e}"));
                }
            }
            Err(e) => problems.push(format!("{name}: missing golden file ({e})")),
        }
    }

    let failing = write_scenario(
        dir.path(),
        "failing",
        r#"{"name": "failing", "n": 8, "guard": 2, "epsilon": {"kind": "quadratic"},
            "riesz": {"cond_target": 10, "seed": 1},
            "checks": [{"id": "nonlinear_cr2", "trials": 5, "tolerance": 1e-300}]}"#,
    );
    let probe_only = write_scenario(
        dir.path(),
        "probe_only",
        r#"{"name": "probe_only", "n": 8, "guard": 2, "epsilon": {"kind": "quadratic"},
            "riesz": "identity", "checks": ["cr3", "biorthogonality"]}"#,
    );
    let non_monotone = write_scenario(
        dir.path(),
        "non_monotone",
        r#"{"name": "bad", "n": 3, "guard": 1, "epsilon": {"kind": "custom", "values": [0, 1, 1, 2]},
            "riesz": "identity", "checks": ["spectrum"]}"#,
    );
    let unknown_key = write_scenario(
        dir.path(),
        "unknown_key",
        r#"{"name": "bad", "n": 4, "guard": 1, "epsilon": {"kind": "linear"},
            "riesz": "identity", "checks": ["spectrum"], "colour": "blue"}"#,
    );
    let missing = dir.path().join("does_not_exist.json");
    let expectations = [(&failing, 1), (&probe_only, 0), (&non_monotone, 2), (&unknown_key, 2), (&missing, 2)];
    for (path, expected) in expectations {
        let o = nlpb(&["run", path.to_str().unwrap(), "--out", dir.path().join("x.json").to_str().unwrap()]);
        if o.code != expected {
            problems.push(format!(
                "{}: exit {} (expected {expected}) {}",
                path.file_name().unwrap().to_string_lossy(),
                o.code,
                o.stderr.trim()
            ));
        }
    }
    let bad_args = nlpb(&["run"]);
    if bad_args.code != 2 {
        problems.push(format!("missing argument: exit {}", bad_args.code));
    }

    let summary = format!(
        "{} shipped scenarios byte-identical across runs and matching golden files; exit codes 0/1/2 as expected",
        SHIPPED.len()
    );
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(problems.join("; "))
    }
}
