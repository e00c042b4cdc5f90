//! Scenario files: TOML with `[triple]`, `[model]`, `[action]`, `[state]` and
//! `[options]` sections, plus `--set key=value` overrides on dotted paths.

use std::path::Path;

use serde::Deserialize;
use spectral_lab::linalg::DEFAULT_TOL;
use spectral_lab::{CutoffFunction, LeptonModelParams, MatrixLiteral};

use crate::error::CliError;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "SPECTRAL_LAB_TOL";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub triple: Option<TripleSection>,
    #[serde(default)]
    pub model: ModelSection,
    pub action: Option<ActionSection>,
    pub state: Option<StateSection>,
    #[serde(default)]
    pub options: OptionsSection,
}

/// Either `builtin = "lepton"` or inline matrices, never both.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSection {
    pub builtin: Option<String>,
    pub ko_dim: Option<i64>,
    pub d: Option<MatrixLiteral>,
    pub gamma: Option<MatrixLiteral>,
    pub j_unitary: Option<MatrixLiteral>,
    pub generators: Option<Vec<MatrixLiteral>>,
}

impl TripleSection {
    pub fn has_inline(&self) -> bool {
        self.ko_dim.is_some()
            || self.d.is_some()
            || self.gamma.is_some()
            || self.j_unitary.is_some()
            || self.generators.is_some()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub y_e: f64,
    pub y_nu: f64,
    pub v_gev: f64,
    pub include_sterile: bool,
    pub m_r_gev: f64,
    pub kappa: f64,
    pub lambda_gev: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = LeptonModelParams::default();
        ModelSection {
            y_e: p.y_e,
            y_nu: p.y_nu,
            v_gev: p.v,
            include_sterile: p.include_sterile,
            m_r_gev: p.m_r,
            kappa: p.kappa,
            lambda_gev: 1e15,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> LeptonModelParams {
        LeptonModelParams {
            y_e: self.y_e,
            y_nu: self.y_nu,
            v: self.v_gev,
            include_sterile: self.include_sterile,
            m_r: self.m_r_gev,
            kappa: self.kappa,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSection {
    pub lambda: f64,
    pub cutoff: CutoffFunction,
    pub physical_projector: Option<ProjectorSpec>,
}

/// `"sterile-excluded"` (builtin lepton triple only) or an explicit matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProjectorSpec {
    Named(String),
    Matrix(MatrixLiteral),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub psi: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub zero: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    pub tol: Option<f64>,
    pub product_depth: Option<usize>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub steps: Option<usize>,
    pub spectrum: Option<SpectrumSpec>,
}

/// Spectrum for `weyl-scan`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    /// `n + ½` for `n_min ≤ n ≤ n_max`.
    Circle {
        n_min: i64,
        n_max: i64,
    },
    Values {
        values: Vec<f64>,
    },
}

impl ScenarioConfig {
    /// Reads `path` (or starts from an empty document), applies overrides in
    /// order and deserializes the result.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::ConfigParse(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let origin = path.map(|p| p.display().to_string()).unwrap_or_else(|| "<empty config>".into());
        Self::from_toml_str(&text, overrides, &origin)
    }

    pub fn from_toml_str(text: &str, overrides: &[String], origin: &str) -> Result<Self, CliError> {
        if overrides.is_empty() {
            return parse_document(text, origin);
        }
        let mut table: toml::Table = text.parse().map_err(|e| CliError::ConfigParse(format!("{origin}: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let merged = toml::to_string(&table).map_err(|e| CliError::ConfigParse(format!("{origin}: {e}")))?;
        parse_document(&merged, &format!("{origin} (with --set overrides)"))
    }

    /// `options.tol`, then `SPECTRAL_LAB_TOL`, then the library default.
    pub fn tolerance(&self) -> Result<f64, CliError> {
        let tol = match self.options.tol {
            Some(t) => t,
            None => match std::env::var(TOL_ENV) {
                Ok(raw) => raw
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::ConfigParse(format!("{TOL_ENV}: `{raw}` is not a number")))?,
                Err(_) => DEFAULT_TOL,
            },
        };
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Validation(format!("options.tol: must be positive and finite, got {tol}")));
        }
        Ok(tol)
    }
}

fn parse_document(text: &str, origin: &str) -> Result<ScenarioConfig, CliError> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::ConfigParse(format!("{origin}: {e}")))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        CliError::ConfigParse(format!("{origin}: offending key `{key}`: {}", e.into_inner()))
    })
}

/// Applies `a.b.c=value`. The value is read as a TOML literal, falling back
/// to a bare string.
pub fn apply_override(table: &mut toml::Table, raw: &str) -> Result<(), CliError> {
    let (path, value) =
        raw.split_once('=').ok_or_else(|| CliError::ConfigParse(format!("--set `{raw}`: expected key=value")))?;
    let path = path.trim();
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::ConfigParse(format!("--set `{raw}`: malformed key `{path}`")));
    }
    let value = parse_value(value.trim());

    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut current = table;
    for key in parents {
        let entry = current.entry(key.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| CliError::ConfigParse(format!("--set `{raw}`: `{key}` is not a table")))?;
    }
    current.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
