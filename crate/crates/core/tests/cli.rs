use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn momentforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentforge")).args(args).current_dir(dir).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn comparison<'a>(r: &'a Value, field: &str) -> &'a Value {
    r["comparisons"].as_array().unwrap().iter().find(|c| c["field"] == field).unwrap_or_else(|| panic!("no {field}"))
}

#[test]
fn thm2_l5_reports_genus_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentforge(&["scenario", "run", "thm2", "--l", "5", "--density", "0.1", "--out", "report.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["schema"], "momentforge-report/1");
    assert_eq!(r["surface"]["invariants"]["genus"], 3);
    let g = comparison(&r, "genus");
    assert_eq!(g["match"], true);
    assert_eq!(g["provenance"], "paper");
    assert_eq!(r["parameters"]["b"], "1/1");
}

#[test]
fn literal_preset_is_a_strict_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentforge(&["scenario", "run", "thm2-literal", "--strict", "--density", "0.1", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let r = read_json(&dir.path().join("r.json"));
    let w = r["validation"]["witnesses"].as_array().unwrap();
    assert!(w.iter().any(|w| w["condition"] == "cond3a"));
    assert!(!r["strict_failures"].as_array().unwrap().is_empty());
    // without --strict the same run succeeds
    let out = momentforge(&["scenario", "run", "thm2-literal", "--density", "0.1", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn case_a_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentforge(
        &["scenario", "run", "caseA", "--density", "0.1", "--dot", "reeb.dot", "--svg", "slice.svg", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = std::fs::read_to_string(dir.path().join("reeb.dot")).unwrap();
    assert_eq!(dot.matches("label=").count(), 2);
    assert_eq!(dot.matches("->").count(), 2);
    let svg = std::fs::read_to_string(dir.path().join("slice.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // a rectangle: four arcs, four corners, two colors
    assert_eq!(svg.matches("<path").count(), 4);
    assert_eq!(svg.matches("<circle").count(), 4);
    assert!(svg.contains("#1f77b4") && svg.contains("#d62728"));
}

#[test]
fn reports_are_byte_stable_and_reparse() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = momentforge(&["scenario", "run", "caseB", "--density", "0.1", "--samples", "3000", "--out", name], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    let min = v["validation"]["min_lift_measure"].as_f64().unwrap();
    assert!(a.contains(&format!("\"min_lift_measure\": {min:?}")), "floats parse exactly");
}

#[test]
fn single_verbs_and_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentforge(&["singular", "thm3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let vals: Vec<f64> =
        r["singular"]["closed_form"]["values"].as_array().unwrap().iter().map(|v| v["value"].as_f64().unwrap()).collect();
    assert_eq!(vals, vec![0.0, 1.0]);
    assert!(r["surface"].is_null());

    let out = momentforge(&["slice", "caseC", "--axis", "2", "--value", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["slice"]["fixed"][0][1], 0.5);

    let cfg = r#"{
        "arrangement": {"n": 2, "hypersurfaces": [
            {"terms": [["1", [0, 0]], ["-1", [2, 0]], ["-1", [0, 2]]], "color": 1},
            {"terms": [["1/2", [0, 0]], ["1", [1, 0]]], "color": 2}
        ], "bbox": [[-2, 2], [-2, 2]]},
        "actions": ["validate", "double"],
        "options": {"slice": [], "density": 0.1}
    }"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let out = momentforge(&["scenario", "run", "--config", "cfg.json", "--out", "inline.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("inline.json"));
    assert_eq!(r["scenario"], "inline");
    assert_eq!(r["validation"]["cond3a_ok"], true);
    // a disk cut by a chord, two colors: a sphere
    assert_eq!(r["surface"]["invariants"]["chi"], 2);
}

#[test]
fn errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentforge(&["scenario", "run", "no-such-scenario"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
    let out = momentforge(&["scenario", "run", "thm2", "--l", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let out = momentforge(&["validate", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
