mod common;

use std::fs;

use common::{bin, golden_dir, run, stderr, stdout};
use spectral_lab_cli::report::strip_duration;

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("report is valid JSON")
}

#[test]
fn malformed_config_exits_two_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "bad.toml", "[action]\nlambda = 1.0\ncutof = { kind = \"sharp\" }\n");
    let out = run(&["bosonic-action", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("cutof"), "{}", stderr(&out));

    let path = write(&dir, "syntax.toml", "[model\nkappa = 1\n");
    assert_eq!(run(&["mass-estimate", "--config", &path]).status.code(), Some(2));
    assert_eq!(run(&["mass-estimate", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(run(&["mass-estimate", "--set", "nokey"]).status.code(), Some(2));
}

#[test]
fn validation_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let both = write(&dir, "both.toml", "[triple]\nbuiltin = \"lepton\"\nd = { dim = 1, entries = [[1, 0]] }\n");
    let out = run(&["check-axioms", "--config", &both]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).is_empty());

    let mismatch = write(
        &dir,
        "dims.toml",
        "[triple]\nd = { dim = 2, entries = [[1, 0], [0, 0], [0, 0], [-1, 0]] }\n[state]\npsi = [[1, 0]]\n",
    );
    assert_eq!(run(&["fermionic-action", "--config", &mismatch]).status.code(), Some(3));
    assert_eq!(run(&["mass-estimate", "--set", "model.lambda_gev=-1"]).status.code(), Some(3));
    assert_eq!(run(&["verify-identity"]).status.code(), Some(3));
}

#[test]
fn failed_checks_exit_one_with_full_report() {
    // a Majorana mass on the unrepresented sterile state breaks the first-order condition
    let out = run(&[
        "check-axioms",
        "--set",
        "triple.builtin=\"lepton\"",
        "--set",
        "model.include_sterile=true",
        "--set",
        "model.y_nu=0.3",
        "--set",
        "model.m_r_gev=1000.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["pass.order_one"], false);
    assert_eq!(report["pass.self_adjoint"], true);
    assert_eq!(report["result.failed"], "order_one");
}

#[test]
fn every_exit_code_is_in_range() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["mass-estimate"],
        vec!["weyl-scan", "--steps", "3"],
        vec!["gauge-invariance", "--set", "options.samples=10"],
        vec!["check-axioms"],
        vec!["expand", "--set", "options.order=9"],
    ];
    for args in cases {
        let code = run(&args).status.code().unwrap();
        assert!((0..=4).contains(&code), "{args:?}: {code}");
    }
}

#[test]
fn environment_tolerance_is_used_unless_config_overrides() {
    let out = bin().env("SPECTRAL_LAB_TOL", "1e-6").args(["mass-estimate"]).output().unwrap();
    assert_eq!(json(&out)["input.tol"].as_f64(), Some(1e-6));
    let out =
        bin().env("SPECTRAL_LAB_TOL", "1e-6").args(["mass-estimate", "--set", "options.tol=1e-9"]).output().unwrap();
    assert_eq!(json(&out)["input.tol"].as_f64(), Some(1e-9));
    let out = bin().env("SPECTRAL_LAB_TOL", "tiny").args(["mass-estimate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_controls_sampling() {
    let a = run(&["gauge-invariance", "--seed", "1", "--set", "options.samples=50"]);
    let b = run(&["gauge-invariance", "--seed", "1", "--set", "options.samples=50"]);
    let c = run(&["gauge-invariance", "--seed", "2", "--set", "options.samples=50"]);
    assert_eq!(strip_duration(&stdout(&a)), strip_duration(&stdout(&b)));
    assert_ne!(strip_duration(&stdout(&a)), strip_duration(&stdout(&c)));
    assert_eq!(json(&a)["input.seed"], 1);
}

#[test]
fn weyl_flags_override_config() {
    let config = golden_dir().join("weyl_scan.toml");
    let out = run(&[
        "weyl-scan",
        "--config",
        config.to_str().unwrap(),
        "--lambda-min",
        "1",
        "--lambda-max",
        "2",
        "--steps",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "lambda,count\n1.00000000000e0,2\n2.00000000000e0,4\n");
}

#[test]
fn csv_and_text_formats() {
    let out = run(&["mass-estimate", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("result.mass_ev,6.05160000000e-2\n"));
    let out = run(&["mass-estimate", "--format", "text"]);
    assert!(stdout(&out).contains("result.mass_ev = 6.05160000000e-2\n"));
}

#[test]
fn batch_preserves_order_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_dir();
    let mut text = String::new();
    for name in ["weyl_scan", "mass_estimate", "check_axioms", "verify_identity", "gauge_invariance"] {
        text.push_str(&format!(
            "[[scenario]]\ncommand = \"{}\"\nconfig = {:?}\n\n",
            name.replace('_', "-"),
            golden.join(format!("{name}.toml")).to_str().unwrap()
        ));
    }
    text.push_str("[[scenario]]\ncommand = \"mass-estimate\"\nset = [\"model.kappa=0.5\"]\n");
    let path = write(&dir, "batch.toml", &text);

    let serial = run(&["batch", "--config", &path, "--jobs", "1"]);
    let parallel = run(&["batch", "--config", &path, "--jobs", "4"]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(strip_duration(&stdout(&serial)), strip_duration(&stdout(&parallel)));

    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&parallel)).unwrap();
    let commands: Vec<&str> = reports.iter().map(|r| r["command"].as_str().unwrap()).collect();
    assert_eq!(
        commands,
        ["weyl-scan", "mass-estimate", "check-axioms", "verify-identity", "gauge-invariance", "mass-estimate"]
    );
    assert_eq!(reports[5]["input.kappa"].as_f64(), Some(0.5));
}

#[test]
fn batch_reports_worst_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[[scenario]]\ncommand = \"mass-estimate\"\n\n[[scenario]]\ncommand = \"verify-identity\"\n";
    let path = write(&dir, "batch.toml", text);
    let out = run(&["batch", "--config", &path, "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);

    let bad = write(&dir, "unknown.toml", "[[scenario]]\ncommand = \"nope\"\n");
    assert_eq!(run(&["batch", "--config", &bad]).status.code(), Some(2));
}
