//! End-to-end tests against the built binary: value pins, exit codes,
//! config round-trips, format equality, and the output directory contract.

#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cascade-laser"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Value of a `name,value` CSV result row.
fn csv_value(text: &str, name: &str) -> f64 {
    let prefix = format!("{name},");
    let line = text
        .lines()
        .find(|l| l.strip_prefix(&prefix).is_some())
        .unwrap_or_else(|| panic!("no row {name:?} in:\n{text}"));
    line[prefix.len()..].parse().expect("numeric field")
}

#[test]
fn coefficients_pin_regression_values() {
    let out = run(&[
        "coefficients",
        "--A",
        "0.33",
        "--kappa",
        "0.2",
        "--omega",
        "1.0",
        "--eta",
        "0.5",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!((csv_value(&text, "b") - 2.5).abs() < 1e-12);
    assert!((csv_value(&text, "mu") - 0.40447302994931885).abs() < 1e-12);
    assert!((csv_value(&text, "beta") - 0.066).abs() < 1e-12);
    assert!((csv_value(&text, "chi_plus") - 0.68118257487329713).abs() < 1e-12);
    assert!(text.contains("below_threshold,true"));
}

#[test]
fn coefficients_undriven_balanced_has_no_mixing() {
    let out = run(&["coefficients", "--omega", "0", "--eta", "0", "--A", "1", "--kappa", "0.2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("beta,0.00000000000e0"));
}

#[test]
fn domain_violations_exit_2() {
    let out = run(&["coefficients", "--A", "0.33", "--kappa", "0.2", "--eta", "1.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("eta"));

    let out = run(&["photon", "--A", "1.0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("kappa"));
}

#[test]
fn above_threshold_exits_3() {
    let out = run(&["variance", "--A", "0.99", "--kappa", "0.2", "--omega", "3.5", "--eta", "1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("lambda_minus"));
}

#[test]
fn photon_undriven_balanced_value() {
    let out = run(&["photon", "--A", "0.3", "--kappa", "0.2", "--omega", "0", "--eta", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(csv_value(&stdout(&out), "mean_photon"), 0.75);
}

#[test]
fn variance_headline_point() {
    let out = run(&["variance", "--A", "1000", "--kappa", "0.2", "--omega", "0.012", "--eta", "0"]);
    assert_eq!(code(&out), 0);
    let v = csv_value(&stdout(&out), "var_minus");
    assert!((v - 0.017190930957897287).abs() < 1e-12);
}

#[test]
fn csv_output_round_trips_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.csv");

    let first = run(&[
        "variance", "--A", "0.99", "--kappa", "0.2", "--omega", "10.1", "--eta", "1",
        "--at-time", "40",
    ]);
    assert_eq!(code(&first), 0);
    std::fs::write(&cfg, &first.stdout).unwrap();

    let second = run(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);

    // The transient value at the quoted showcase point.
    let v = csv_value(&stdout(&first), "var_minus");
    assert!((v - 0.65544667396151320).abs() < 1e-11);
    assert!(stdout(&first).contains("convergent,false"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("base.txt");
    std::fs::write(&cfg, "A = 0.33\nkappa = 0.2\nomega = 1.0\neta = 0.5\n").unwrap();

    let overridden = run(&["variance", "--config", cfg.to_str().unwrap(), "--omega", "0"]);
    let direct = run(&["variance", "--A", "0.33", "--kappa", "0.2", "--omega", "0", "--eta", "0.5"]);
    assert_eq!(code(&overridden), 0);
    assert_eq!(overridden.stdout, direct.stdout);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    std::fs::write(&cfg, "A = 0.33\nkappa = 0.2\nbogus = 1\n").unwrap();
    let out = run(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn config_subcommand_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.csv");
    let first = run(&["variance", "--A", "0.5", "--kappa", "0.2"]);
    std::fs::write(&cfg, &first.stdout).unwrap();
    let out = run(&["photon", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn json_round_trips_and_matches_csv_numbers() {
    let args = ["variance", "--A", "0.5", "--kappa", "0.2", "--omega", "10.5", "--eta", "1"];
    let csv = run(&args);
    let json = run(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(code(&csv), 0);
    assert_eq!(code(&json), 0);

    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let results = doc["results"].as_object().unwrap();
    let csv_text = stdout(&csv);
    for key in ["alpha_sq_plus", "alpha_sq_minus", "var_plus", "var_minus", "mean_photon"] {
        let from_json = results[key].as_f64().unwrap();
        let from_csv = csv_value(&csv_text, key);
        assert_eq!(from_json.to_bits(), from_csv.to_bits(), "{key}");
    }

    // JSON output feeds back as config through its provenance object.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, &json.stdout).unwrap();
    let again = run(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(again.stdout, json.stdout);
}

#[test]
fn sweep_emits_mask_token_and_numbers() {
    let out = run(&[
        "sweep", "--A", "0.99", "--kappa", "0.2", "--eta", "1", "--axis", "omega:3:11:5",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("ABOVE_THRESHOLD"));
    assert!(text.lines().any(|l| l == "omega,var_minus"));
    assert!(text.lines().last().unwrap().starts_with("1.10000000000e1,6.5766859056"));
}

#[test]
fn degenerate_sweep_agrees_with_variance() {
    let sweep = run(&[
        "sweep", "--A", "0.33", "--kappa", "0.2", "--eta", "0.5", "--axis", "omega:1:1:1",
    ]);
    let var = run(&[
        "variance", "--A", "0.33", "--kappa", "0.2", "--omega", "1", "--eta", "0.5",
    ]);
    let row = stdout(&sweep);
    let row = row.lines().last().unwrap();
    let swept: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    let direct = csv_value(&stdout(&var), "var_minus");
    assert_eq!(swept.to_bits(), direct.to_bits());
}

#[test]
fn optimize_without_feasible_point_exits_3() {
    let out = run(&[
        "optimize", "--objective", "maximize_mean_photon", "--A", "2", "--kappa", "0.2",
        "--eta", "1", "--axis", "omega:3.6:20",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("feasible"));
}

#[test]
fn oracle_matches_analytic_quickly() {
    let out = run(&[
        "oracle", "--A", "0.3", "--kappa", "0.2", "--omega", "0", "--eta", "0", "--n-max", "40",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!((csv_value(&text, "mean_photon") - 0.75).abs() < 1e-6);
    assert!(csv_value(&text, "delta_mean_photon").abs() < 1e-6);
    assert!(text.contains("converged,true"));
}

#[test]
fn oracle_tiny_basis_exits_4_with_diagnostics() {
    let out = run(&[
        "oracle", "--A", "0.8", "--kappa", "0.2", "--omega", "0.012", "--eta", "0",
        "--n-max", "6",
    ]);
    assert_eq!(code(&out), 4);
    // Output still lands on stdout so the diagnostics are inspectable.
    assert!(stdout(&out).contains("converged,false"));
    assert!(stderr(&out).contains("tail"));
}

#[test]
fn schema_is_versioned_json() {
    let out = run(&["schema"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["mask_token"], "ABOVE_THRESHOLD");
}

#[test]
fn relative_output_lands_in_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["photon", "--A", "0.3", "--kappa", "0.2", "--output", "p.csv"])
        .env("CASCADE_LASER_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read(dir.path().join("p.csv")).unwrap();
    let direct = run(&["photon", "--A", "0.3", "--kappa", "0.2"]);
    assert_eq!(written, direct.stdout);
    assert!(!Path::new("p.csv").exists());
}

#[test]
fn simulate_is_seeded_and_consistent() {
    let args = [
        "simulate", "--A", "0.33", "--kappa", "0.2", "--omega", "0", "--eta", "0.3",
        "--n-traj", "300", "--t-final", "5", "--step", "0.01", "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    assert!(csv_value(&text, "z_alpha_sq_plus").abs() < 5.0);
    assert!(csv_value(&text, "z_alpha_sq_minus").abs() < 5.0);
    assert_eq!(csv_value(&text, "mean_plus_im"), 0.0);
}
