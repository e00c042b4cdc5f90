//! Run reports and their JSON, CSV and text renderings.
//!
//! Keys are sorted, numbers use a fixed scientific format with twelve
//! significant digits, and nothing depends on the locale. The only field that
//! varies between identical runs is `duration_ms`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;

/// Key of the wall-clock field, excluded from determinism comparisons.
pub const DURATION_KEY: &str = "duration_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Twelve significant digits in scientific notation. Negative zero prints as
/// zero so that sign noise cannot leak into golden files.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    entries: BTreeMap<String, Value>,
    table: Option<Table>,
    duration_ms: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("command".to_string(), Value::from(command));
        entries.insert("tool_version".to_string(), Value::from(env!("CARGO_PKG_VERSION")));
        RunReport { entries, table: None, duration_ms: 0.0 }
    }

    fn put(&mut self, prefix: &str, key: &str, value: impl Into<Value>) {
        self.entries.insert(format!("{prefix}.{key}"), value.into());
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.put("input", key, value);
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.put("result", key, value);
    }

    pub fn residual(&mut self, key: &str, value: f64) {
        self.put("residual", key, value);
    }

    pub fn check(&mut self, key: &str, passed: bool) {
        self.put("pass", key, passed);
    }

    pub fn set_table(&mut self, table: Table) {
        self.table = Some(table);
    }

    pub fn set_duration_ms(&mut self, ms: f64) {
        self.duration_ms = ms;
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn table(&self) -> Option<&Table> {
        self.table.as_ref()
    }

    /// `false` if any `pass.*` flag is false.
    pub fn all_checks_passed(&self) -> bool {
        self.entries.iter().filter(|(k, _)| k.starts_with("pass.")).all(|(_, v)| *v == Value::Bool(true))
    }

    /// Sorted records including the duration.
    fn records(&self) -> Vec<(String, String, bool)> {
        let mut out: Vec<(String, String, bool)> = self
            .entries
            .iter()
            .map(|(k, v)| {
                let (s, quoted) = match v {
                    Value::Num(x) => (format_number(*x), false),
                    Value::Int(i) => (i.to_string(), false),
                    Value::Bool(b) => (b.to_string(), false),
                    Value::Text(t) => (t.clone(), true),
                };
                (k.clone(), s, quoted)
            })
            .collect();
        out.push((DURATION_KEY.to_string(), format!("{:.3}", self.duration_ms), false));
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_json(&self) -> String {
        let mut lines: Vec<(String, String)> = self
            .records()
            .into_iter()
            .map(|(k, v, quoted)| {
                let value = if quoted {
                    json_string(&v)
                } else if v == "nan" || v.ends_with("inf") {
                    "null".to_string()
                } else {
                    v
                };
                (k, value)
            })
            .collect();
        if let Some(t) = &self.table {
            let columns: Vec<String> = t.columns.iter().map(|c| json_string(c)).collect();
            let mut body = format!("{{\n    \"columns\": [{}],\n    \"rows\": [", columns.join(", "));
            for (i, row) in t.rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(json_cell).collect();
                let sep = if i + 1 == t.rows.len() { "" } else { "," };
                write!(body, "\n      [{}]{sep}", cells.join(", ")).unwrap();
            }
            body.push_str(if t.rows.is_empty() { "]\n  }" } else { "\n    ]\n  }" });
            lines.push(("table".to_string(), body));
            lines.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut out = String::from("{\n");
        for (i, (k, v)) in lines.iter().enumerate() {
            let sep = if i + 1 == lines.len() { "" } else { "," };
            writeln!(out, "  {}: {v}{sep}", json_string(k)).unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Two columns `key,value` with a header row. Reports carrying a table
    /// emit only the table, so the output stays rectangular.
    fn render_csv(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.table {
            let header: Vec<String> = t.columns.iter().map(|c| csv_field(c)).collect();
            writeln!(out, "{}", header.join(",")).unwrap();
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|v| csv_field(&plain_cell(v))).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
            return out;
        }
        out.push_str("key,value\n");
        for (k, v, _) in self.records() {
            writeln!(out, "{},{}", csv_field(&k), csv_field(&v)).unwrap();
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v, _) in self.records() {
            writeln!(out, "{k} = {v}").unwrap();
        }
        if let Some(t) = &self.table {
            writeln!(out, "\n{}", t.columns.join("\t")).unwrap();
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(plain_cell).collect();
                writeln!(out, "{}", cells.join("\t")).unwrap();
            }
        }
        out
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn plain_cell(v: &Value) -> String {
    match v {
        Value::Num(x) => format_number(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(t) => t.clone(),
    }
}

fn json_cell(v: &Value) -> String {
    match v {
        Value::Text(t) => json_string(t),
        Value::Num(x) if !x.is_finite() => "null".into(),
        other => plain_cell(other),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Drops the duration record from a rendered report.
pub fn strip_duration(rendered: &str) -> String {
    rendered
        .lines()
        .filter(|l| {
            let l = l.trim_start();
            !(l.starts_with(&format!("\"{DURATION_KEY}\""))
                || l.starts_with(&format!("{DURATION_KEY},"))
                || l.starts_with(&format!("{DURATION_KEY} =")))
        })
        .collect::<Vec<_>>()
        .join("\n")
}
