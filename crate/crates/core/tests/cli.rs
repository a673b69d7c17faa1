//! End-to-end CLI tests: exit codes, report files, config validation.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_warped-poisson")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wp_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn cli")
}

fn write_sinh_config() -> PathBuf {
    let path = tmp("sinh.json");
    std::fs::write(
        &path,
        r#"{"dimension": 3, "family": {"space_form": {"curvature": -1.0}}, "r_max": 60.0}"#,
    )
    .unwrap();
    path
}

#[test]
fn help_covers_subcommands() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "manifold",
        "spectrum",
        "green",
        "poisson",
        "criterion",
        "verify",
        "sharpness",
    ] {
        assert!(text.contains(sub), "--help must document '{sub}'");
    }
    // Per-subcommand help documents defaults.
    let out = run(&["criterion", "--help"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("default"));
}

#[test]
fn unknown_config_key_is_schema_error() {
    let path = tmp("bad.json");
    std::fs::write(
        &path,
        r#"{"dimension": 3, "family": "euclidean", "wiggle": 1}"#,
    )
    .unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "manifold", "info"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("wiggle"),
        "schema error must name the key: {err}"
    );
}

#[test]
fn spectrum_requires_domain() {
    let out = run(&["spectrum"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn poisson_prints_pole_value() {
    let json = tmp("poisson.json");
    let out = run(&[
        "poisson",
        "--source",
        "expdecay:1",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("u(p) = 1.000000"), "{text}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["report"]["outcome"], "finite");
}

#[test]
fn green_csv_has_schema() {
    let cfg = write_sinh_config();
    let csv = tmp("green.csv");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "green",
        "--kind",
        "minimal",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,value"));
    let first = lines.next().unwrap();
    let cols: Vec<&str> = first.split(',').collect();
    assert_eq!(cols.len(), 2);
    cols[0].parse::<f64>().unwrap();
    cols[1].parse::<f64>().unwrap();
}

#[test]
fn criterion_verdict_on_hyperbolic() {
    let cfg = write_sinh_config();
    let json = tmp("criterion.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "criterion",
        "--zeta",
        "power:1.5",
        "--jmax",
        "20",
        "--mode",
        "numerical",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("Converges"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["report"]["verdict"], "Converges");
    assert!(doc["report"]["terms"].as_array().unwrap().len() >= 8);
}

#[test]
fn verify_single_suite_passes() {
    let out = run(&["verify", "--suite", "tail_asymptotic"]);
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS]"));
    assert!(text.contains("suite: PASS"));
}

#[test]
fn verify_unknown_suite_fails() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sharpness_csv() {
    let csv = tmp("sharp.csv");
    let out = run(&[
        "sharpness",
        "--gamma",
        "2",
        "--alpha-min",
        "-0.2",
        "--alpha-max",
        "0.2",
        "--step",
        "0.1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("alpha,class,growth_exponent"));
    assert!(text.lines().count() >= 5);
}

#[test]
fn poisson_file_source() {
    // A sampled e^{-r} source must reproduce the closed-form pole value 1.
    let src = tmp("source.csv");
    let mut text = String::from("r,value\n");
    let n = 60000;
    for i in 0..=n {
        let r = 60.0 * i as f64 / n as f64;
        text.push_str(&format!("{r},{}\n", (-r).exp()));
    }
    std::fs::write(&src, text).unwrap();
    let out = run(&["poisson", "--source", &format!("file:{}", src.display())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("u(p) = 1.000"), "{text}");
}

#[test]
fn parabolic_green_via_config() {
    let path = tmp("cusp.json");
    std::fs::write(
        &path,
        r#"{"dimension": 3, "family": "exp_decay_cusp", "r_max": 42.0}"#,
    )
    .unwrap();
    let out = run(&[
        "--config",
        path.to_str().unwrap(),
        "green",
        "--kind",
        "parabolic",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Requesting the minimal kind on a parabolic manifold is a precondition
    // error pointing at the parabolic construction.
    let out = run(&[
        "--config",
        path.to_str().unwrap(),
        "green",
        "--kind",
        "minimal",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parabolic"));
}
