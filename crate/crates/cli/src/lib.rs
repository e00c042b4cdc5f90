//! Config-driven scenario runner for the `spectral-lab` toolkit.
//!
//! Every computation of the library is exposed as a subcommand that reads a
//! TOML scenario, runs it and prints a key-sorted report on stdout.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Deserialize;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use report::{Format, RunReport};
pub use run::{run_scenario, Command};

/// One entry of a batch file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub command: String,
    /// Scenario file, relative to the batch file.
    pub config: Option<PathBuf>,
    #[serde(default)]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchFile {
    pub scenario: Vec<BatchEntry>,
}

impl BatchFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigParse(format!("cannot read {}: {e}", path.display())))?;
        let de =
            toml::Deserializer::parse(&text).map_err(|e| CliError::ConfigParse(format!("{}: {e}", path.display())))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            CliError::ConfigParse(format!("{}: offending key `{}`: {}", path.display(), e.path(), e.inner()))
        })
    }
}

/// Loads and runs one batch entry. `extra` overrides are applied after the
/// entry's own.
pub fn run_entry(entry: &BatchEntry, base: &Path, extra: &[String]) -> Result<RunReport, CliError> {
    let command: Command = entry.command.parse().map_err(CliError::ConfigParse)?;
    let path = entry.config.as_ref().map(|p| base.join(p));
    let mut sets = entry.set.clone();
    sets.extend_from_slice(extra);
    let cfg = ScenarioConfig::load(path.as_deref(), &sets)?;
    run_scenario(command, &cfg)
}

/// Runs every entry on up to `jobs` threads. Results come back in file order
/// regardless of scheduling.
pub fn run_batch(batch: &BatchFile, base: &Path, extra: &[String], jobs: usize) -> Vec<Result<RunReport, CliError>> {
    let n = batch.scenario.len();
    let slots: Vec<Mutex<Option<Result<RunReport, CliError>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let result = run_entry(&batch.scenario[i], base, extra);
                *slots[i].lock().expect("slot lock") = Some(result);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot is filled")).collect()
}
