//! File artifacts of a run. Everything is rendered to memory first.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Format, Resolved};
use crate::error::CliError;

/// Shortest representation that parses back to the same f64; exponent form away from unit scale.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// Column names carry their unit as a suffix (`_us`, `_mhz`, ...).
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[derive(Default)]
pub struct Artifacts {
    pub tables: Vec<(&'static str, Table)>,
    /// Non-tabular files (pulse envelopes), written regardless of format selection.
    pub files: Vec<(&'static str, String)>,
    pub results: Map<String, Value>,
}

impl Artifacts {
    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_owned(), value.into());
    }
}

/// Rebuilds every object with keys in sorted order, whatever map type serde_json was built with.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonical(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn summary(resolved: &Resolved, results: &Map<String, Value>) -> Result<String, CliError> {
    let config = serde_json::to_value(resolved).map_err(|e| CliError::invalid("config", e.to_string()))?;
    let doc = serde_json::json!({
        "tool": { "name": "fluxlink", "version": env!("CARGO_PKG_VERSION") },
        "experiment": resolved.experiment.name(),
        "config": config,
        "results": Value::Object(results.clone()),
    });
    let mut text = serde_json::to_string_pretty(&canonical(doc)).map_err(|e| CliError::invalid("summary", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_all(dir: &Path, resolved: &Resolved, artifacts: &Artifacts) -> Result<Vec<String>, CliError> {
    let mut rendered: Vec<(String, String)> = Vec::new();
    if resolved.formats.contains(&Format::Csv) {
        for (name, table) in &artifacts.tables {
            rendered.push((format!("{name}.csv"), table.render()));
        }
    }
    for (name, text) in &artifacts.files {
        rendered.push(((*name).to_owned(), text.clone()));
    }
    if resolved.formats.contains(&Format::Json) {
        rendered.push(("summary.json".to_owned(), summary(resolved, &artifacts.results)?));
    }

    let write_err = |path: &Path| {
        let path = path.to_owned();
        move |source| CliError::Write { path, source }
    };
    std::fs::create_dir_all(dir).map_err(write_err(dir))?;
    let mut names = Vec::with_capacity(rendered.len());
    for (name, text) in rendered {
        let path = dir.join(&name);
        std::fs::write(&path, text).map_err(write_err(&path))?;
        names.push(name);
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_a_header_row() {
        let mut t = Table::new(&["time_us", "p_g0"]);
        t.push_nums(&[0.0, 0.5]);
        t.push_nums(&[0.1, 1.0 / 3.0]);
        t.push_nums(&[1.5e-9, -2e20]);
        assert_eq!(t.render(), "time_us,p_g0\n0,0.5\n0.1,0.3333333333333333\n1.5e-9,-2e20\n");
    }

    #[test]
    fn canonical_sorts_nested_keys() {
        let v = serde_json::json!({"b": {"z": 1, "a": 2}, "a": [ {"y": 0, "x": 1} ]});
        let s = serde_json::to_string(&canonical(v)).unwrap();
        assert_eq!(s, r#"{"a":[{"x":1,"y":0}],"b":{"a":2,"z":1}}"#);
    }
}
