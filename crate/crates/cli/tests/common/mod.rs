#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spectral_lab_cli::report::strip_duration;

pub const GOLDEN: [&str; 9] = [
    "check_axioms",
    "bosonic_action",
    "fermionic_action",
    "extended_action",
    "expand",
    "verify_identity",
    "gauge_invariance",
    "mass_estimate",
    "weyl_scan",
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}

pub fn command_for(name: &str) -> String {
    name.replace('_', "-")
}

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spectral-lab"));
    cmd.env_remove("SPECTRAL_LAB_TOL");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

/// Runs a golden scenario and returns its report without the duration line.
pub fn run_golden(name: &str, format: &str) -> (String, i32) {
    let config = golden_dir().join(format!("{name}.toml"));
    let out = run(&[&command_for(name), "--config", config.to_str().unwrap(), "--format", format]);
    (strip_duration(&stdout(&out)), out.status.code().expect("exit code"))
}

fn tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, ',' | '[' | ']' | '{' | '}' | ':'))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Compares two reports token by token, allowing numbers to differ by
/// `1e-12 + 1e-9·|x|`. Returns the first mismatch.
pub fn compare_reports(actual: &str, expected: &str) -> Result<(), String> {
    let a: Vec<&str> = actual.lines().collect();
    let e: Vec<&str> = expected.lines().collect();
    if a.len() != e.len() {
        return Err(format!("{} lines, expected {}", a.len(), e.len()));
    }
    for (la, le) in a.iter().zip(&e) {
        if la == le {
            continue;
        }
        let (ta, te) = (tokens(la), tokens(le));
        if ta.len() != te.len() {
            return Err(format!("`{la}` vs `{le}`"));
        }
        for (x, y) in ta.iter().zip(&te) {
            if x == y {
                continue;
            }
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) if (u - v).abs() <= 1e-12 + 1e-9 * v.abs() => {}
                _ => return Err(format!("`{la}` vs `{le}`")),
            }
        }
    }
    Ok(())
}
