use std::path::Path;
use std::process::{Command, Output};

fn waysim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waysim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn default_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = waysim(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS"));
    assert!(!out.contains("FAIL"));
    let csv = std::fs::read_to_string(dir.path().join("waysim_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# waysim sweep schema 1"));
    assert!(lines.next().unwrap().starts_with("lambda,var_e,var_e_expected"));
    assert_eq!(lines.count(), 4);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("waysim_sweep.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["command"], "verify");
    assert_eq!(json["records"].as_array().unwrap().len(), 4);
    assert!(json["checks"].as_array().is_some());
}

#[test]
fn alt_bounds_report_expected_violation_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let o = waysim(&["bounds", "--model", "alt", "--lambda", "0.5,3", "--out", "alt.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("EXPECTED-VIOLATION"));
    assert!(dir.path().join("alt.csv").exists());
    assert!(dir.path().join("alt.json").exists());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "model": "ozawa",
        "lambda_values": [2.0],
        "grid": {"n": 512, "x_min": -12.0, "x_max": 12.0},
        "probes": {"ozawa": {
            "phi1": {"family": "box", "center": 0.0, "halfwidth": 1.0},
            "phi2": {"family": "box", "center": 0.0, "halfwidth": 2.0}
        }}
    }"#;
    std::fs::write(dir.path().join("c.json"), cfg).unwrap();
    let o = waysim(
        &["repeat", "-c", "c.json", "--lambda", "1e6", "--grid-span=-16,16", "--out", "r/rep.csv", "--emit-plot-data"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("repeat_upper"));
    assert!(dir.path().join("r/rep.csv").exists());
    let tsv = std::fs::read_to_string(dir.path().join("r/rep_lambda0.tsv")).unwrap();
    assert_eq!(tsv.lines().next().unwrap().split('\t').count(), 2);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"lambda": [1.0]}"#).unwrap();
    assert_eq!(waysim(&["sweep", "-c", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(waysim(&["sweep", "-c", "missing.json"], dir.path()).status.code(), Some(2));
    assert_eq!(waysim(&["sweep", "--lambda", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(waysim(&["sweep", "--grid-span=3"], dir.path()).status.code(), Some(2));
}

#[test]
fn inadequate_grid_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = waysim(&["sweep", "--grid-n", "8"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
}

#[test]
fn sweeps_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = waysim(&["sweep", "--lambda", "1,5", "--seed", "3", "--out", name], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}
