mod common;

use serde_json::Value;

use common::{nlpb, scenario_path};

#[test]
fn version_prints_crate_version() {
    let o = nlpb(&["version"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.trim(), format!("nlpb {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn list_checks_is_a_complete_catalog() {
    let o = nlpb(&["list-checks"]);
    assert_eq!(o.code, 0);
    let cat: Vec<Value> = serde_json::from_str(&o.stdout).unwrap();
    let ids: Vec<&str> = cat.iter().map(|c| c["id"].as_str().unwrap()).collect();
    for id in ["nonlinear_cr2", "iterated_identity", "spectrum", "weyl", "drift"] {
        assert!(ids.contains(&id), "{id}");
    }
    for c in &cat {
        assert!(c["module"].is_string() && c["anchor"].is_string(), "{c}");
        assert!(c["params"].is_object());
    }
}

#[test]
fn parallel_run_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario_path("quadratic_riesz");
    let seq = dir.path().join("seq.json");
    let par = dir.path().join("par.json");
    assert_eq!(nlpb(&["run", path.to_str().unwrap(), "--out", seq.to_str().unwrap()]).code, 0);
    assert_eq!(
        nlpb(&["run", path.to_str().unwrap(), "--out", par.to_str().unwrap(), "--jobs", "4"]).code,
        0
    );
    let strip = |p: &std::path::Path| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(strip(&seq), strip(&par));
}

#[test]
fn seed_flag_overrides_scenario_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let path = scenario_path("linear_boson");
    let o = nlpb(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(o.code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn table_and_json_on_stdout_without_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(
        &scenario,
        r#"{"name": "s", "n": 6, "guard": 1, "epsilon": {"kind": "linear"}, "riesz": "identity", "checks": ["spectrum"]}"#,
    )
    .unwrap();
    let o = nlpb(&["run", scenario.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("check"));
    assert!(o.stdout.contains("\"verdict\": \"pass\""));
}

#[test]
fn scenario_output_is_relative_to_the_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(
        &scenario,
        r#"{"name": "s", "n": 6, "guard": 1, "epsilon": {"kind": "linear"}, "riesz": "identity",
            "checks": ["spectrum"], "output": "reports/s.json"}"#,
    )
    .unwrap();
    assert_eq!(nlpb(&["run", scenario.to_str().unwrap()]).code, 0);
    assert!(dir.path().join("reports/s.json").exists());
}

#[test]
fn check_error_is_embedded_and_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    // Linear ε has equal α's, which the ladder equivalences reject.
    std::fs::write(
        &scenario,
        r#"{"name": "s", "n": 8, "guard": 2, "epsilon": {"kind": "linear"}, "riesz": "identity",
            "checks": ["ladder_equivalence", "spectrum"]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = nlpb(&["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["checks"][0]["error"].as_str().unwrap().contains("hypothesis"));
    assert_eq!(v["checks"][1]["passed"], true);
}
