//! Shipped scenarios against their golden reports. Set `NLPB_BLESS=1` to
//! rewrite the golden files from the current build.

mod common;

use serde_json::Value;

use common::{golden_path, matches_golden, run_to_file, scenario_path, SHIPPED};

#[test]
fn shipped_scenarios_match_golden_reports() {
    let dir = tempfile::tempdir().unwrap();
    let bless = std::env::var_os("NLPB_BLESS").is_some();
    for name in SHIPPED {
        let (code, text) = run_to_file(&scenario_path(name), dir.path(), name);
        assert_eq!(code, 0, "{name} should pass");
        if bless {
            std::fs::write(golden_path(name), &text).unwrap();
            continue;
        }
        let golden: Value = serde_json::from_str(&std::fs::read_to_string(golden_path(name)).unwrap()).unwrap();
        let actual: Value = serde_json::from_str(&text).unwrap();
        if let Err(e) = matches_golden(&actual, &golden, name) {
            panic!("{e}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in SHIPPED {
        let (_, a) = run_to_file(&scenario_path(name), dir.path(), "a");
        let (_, b) = run_to_file(&scenario_path(name), dir.path(), "b");
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn golden_comparison_detects_changes() {
    let a: Value = serde_json::json!({"x": 1.0, "y": [1e-14], "s": "pass"});
    assert!(matches_golden(&a, &serde_json::json!({"x": 1.0 + 1e-9, "y": [3e-14], "s": "pass"}), "r").is_ok());
    assert!(matches_golden(&a, &serde_json::json!({"x": 1.1, "y": [1e-14], "s": "pass"}), "r").is_err());
    assert!(matches_golden(&a, &serde_json::json!({"x": 1.0, "y": [1e-14], "s": "fail"}), "r").is_err());
    assert!(matches_golden(&a, &serde_json::json!({"x": 1.0, "y": [], "s": "pass"}), "r").is_err());
}
