use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specflow")).args(args).output().expect("binary runs")
}

fn run_config(sub: &str, text: &str, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, text).unwrap();
    let mut args = vec![sub, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn example1_props() {
    let cfg = configs().join("example1.json");
    let o = run(&["check-props", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["p1"], "holds");
    assert_eq!(v["p2"], "holds");
    assert_eq!(v["weak_mixing"], true);
    let explicit = configs().join("example1_explicit.json");
    let o2 = run(&["check-props", "--config", explicit.to_str().unwrap()]);
    assert_eq!(code(&o2), 0, "{}", String::from_utf8_lossy(&o2.stderr));
    assert_eq!(json(&o2)["roof"], v["roof"]);
}

#[test]
fn failing_fixtures_report_witnesses() {
    let o = run_config("check-props", r#"{"alpha":{"preset":"sqrt2m1"},"roof":"p1_fail_orbit"}"#, &[]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["p1"], "fails");
    assert!(v["p1_witness"].is_array());
    assert_eq!(v["weak_mixing"], false);
    let o = run_config("check-props", r#"{"alpha":{"preset":"sqrt2m1"},"roof":"p2_fail_values"}"#, &[]);
    assert_eq!(json(&o)["p2"], "fails");
}

#[test]
fn malformed_inputs_exit_2() {
    assert_eq!(code(&run_config("check-props", "{ not json", &[])), 2);
    assert_eq!(code(&run_config("check-props", r#"{"alpha":{"preset":"pi"},"roof":"example1"}"#, &[])), 2);
    assert_eq!(code(&run_config("check-props", r#"{"alpha":{"preset":"golden"},"roof":"nope"}"#, &[])), 2);
    assert_eq!(code(&run_config("check-props", r#"{"alpha":{"preset":"golden"},"roof":"example1","extra":1}"#, &[])), 2);
    let bad_roof = r#"{"alpha":{"preset":"golden"},"roof":{"xi":["0","1/2"],"d":["1","1"],"v1":"2"}}"#;
    assert_eq!(code(&run_config("check-props", bad_roof, &[])), 2);
    let bad_literal = r#"{"alpha":{"preset":"golden"},"roof":{"xi":["0","1/2"],"d":["-1*q","q"],"v1":"2"}}"#;
    assert_eq!(code(&run_config("check-props", bad_literal, &[])), 2);
    // Missing tolerance: no implicit defaults.
    let no_tol = r#"{"alpha":{"preset":"golden"},"roof":"example1","params":{"n_max":3,"grid":1000}}"#;
    assert_eq!(code(&run_config("birkhoff-audit", no_tol, &[])), 2);
    // Stochastic subcommand without a seed.
    let no_seed = r#"{"alpha":{"preset":"golden"},"roof":"example1","params":{"n_index":4,"random_pairs":2}}"#;
    assert_eq!(code(&run_config("ratner-witness", no_seed, &[])), 2);
    // No SVG for this subcommand.
    let cfg = configs().join("example1.json");
    assert_eq!(code(&run(&["check-props", "--config", cfg.to_str().unwrap(), "--format", "svg"])), 2);
    assert_eq!(code(&run(&["check-props"])), 2);
}

#[test]
fn preconditions_exit_3() {
    let cfg = r#"{"alpha":{"preset":"golden"},"roof":"p1_fail_orbit","params":{"n_index":4,"random_pairs":2}}"#;
    assert_eq!(code(&run_config("ratner-witness", cfg, &["--seed", "1"])), 3);
    let mean = r#"{"alpha":{"preset":"golden"},"params":{"modes":[[0,1.0,0.0]],"truncation":2,"grid":100,"tol":1e-8}}"#;
    assert_eq!(code(&run_config("coboundary", mean, &[])), 3);
    let r0 = r#"{"alpha":{"preset":"golden"},"roof":"example1","params":{"r":["0"]}}"#;
    assert_eq!(code(&run_config("eigen-test", r0, &[])), 3);
}

#[test]
fn verification_failure_exits_1() {
    let cfg = r#"{"alpha":{"preset":"golden"},"params":{"modes":[[1,1.0,0.0]],"truncation":1,"grid":100,"tol":-1.0}}"#;
    assert_eq!(code(&run_config("coboundary", cfg, &[])), 1);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let cfg = r#"{"alpha":{"preset":"sqrt2m1"},"roof":"example1",
        "params":{"n_min":6,"n_max":7,"grid":1000,"mc_samples":5000,"rect":["1/4","3/4","1/4","3/4"]}}"#;
    let a = run_config("rigidity-scan", cfg, &["--seed", "17"]);
    let b = run_config("rigidity-scan", cfg, &["--seed", "17"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let c = run_config("rigidity-scan", cfg, &["--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);

    let w = r#"{"alpha":{"preset":"golden"},"roof":"example1","params":{"n_index":4,"random_pairs":3}}"#;
    let a = run_config("ratner-witness", w, &["--seed", "4", "--format", "csv"]);
    let b = run_config("ratner-witness", w, &["--seed", "4", "--format", "csv"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 4);
}

#[test]
fn out_dir_reports_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ham_trap.json");
    let o = run(&["ham-section", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ham-section.json")).unwrap()).unwrap();
    let jumps = v["jumps"].as_array().unwrap();
    assert_eq!(jumps.len(), 4);
    let sum: f64 = jumps.iter().map(|j| j["d"].as_f64().unwrap()).sum();
    assert!(sum.abs() < 1e-3);
    let csv = std::fs::read_to_string(dir.path().join("ham-section.csv")).unwrap();
    assert!(csv.starts_with("s,s_return,return_time\n"));
    assert_eq!(csv.lines().count(), 201);
    let svg = std::fs::read_to_string(dir.path().join("ham-section.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn eigen_verdicts() {
    let cfg = configs().join("eigen.json");
    let o = run(&["eigen-test", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let verdicts: Vec<_> = v["reports"].as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap().to_string()).collect();
    assert_eq!(verdicts, ["solvable", "solvable", "not_solvable", "solvable"]);
}

#[test]
fn audit_and_coboundary_configs() {
    let o = run_config(
        "birkhoff-audit",
        r#"{"alpha":{"preset":"sqrt2m1"},"roof":"example1","params":{"n_max":6,"grid":2000,"float_tol":1e-9}}"#,
        &["--format", "csv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("true")));
    let cfg = configs().join("coboundary.json");
    let o = run(&["coboundary", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["residual"].as_f64().unwrap() < 1e-8);
}
