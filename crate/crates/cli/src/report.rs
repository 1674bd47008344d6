//! Report emission: pretty JSON plus one CSV per tabular section.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::checks::SuiteReport;
use crate::config::ConfigError;
use crate::experiments::ExperimentReport;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

impl Table {
    /// One row per JSON object; columns are the keys of the first row.
    pub fn from_objects(name: impl Into<String>, rows: &[Value]) -> Self {
        let header: Vec<String> = match rows.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        let rows = rows
            .iter()
            .map(|r| header.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect())
            .collect();
        Self { name: name.into(), header, rows }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ConfigError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| ConfigError::Invalid(format!("csv: {e}"));
        out.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            out.write_record(r).map_err(io)?;
        }
        out.flush().map_err(|e| ConfigError::Io { path: self.name.clone(), source: e })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, ConfigError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

pub fn to_json_string<S: Serialize>(value: &S) -> Result<String, ConfigError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn suite_tables(report: &SuiteReport) -> Vec<Table> {
    let summary: Vec<Value> = report
        .checks
        .iter()
        .map(|c| serde_json::json!({ "label": c.label, "check": c.check, "pass": c.pass, "error": c.error }))
        .collect();
    let mut tables = vec![Table::from_objects("summary", &summary)];
    for c in &report.checks {
        let rows = match &c.detail {
            Value::Array(rows) => rows.clone(),
            Value::Object(m) => match m.get("points") {
                Some(Value::Array(rows)) => rows.clone(),
                _ => continue,
            },
            _ => continue,
        };
        tables.push(Table::from_objects(c.label.clone(), &rows));
    }
    tables
}

pub fn experiment_tables(report: &ExperimentReport) -> Vec<Table> {
    let d = report.dim;
    let mut header: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
    header.extend(["dimension", "distinct_distances", "scale_lo", "scale_hi", "status"].map(String::from));
    let rows = report
        .pins
        .iter()
        .map(|p| {
            let mut row: Vec<String> = p.pin.iter().map(|c| format!("{c:e}")).collect();
            row.push(format!("{:e}", p.dimension));
            row.push(p.distinct_distances.to_string());
            row.push(format!("{:e}", p.scale_lo));
            row.push(format!("{:e}", p.scale_hi));
            row.push(cell(&serde_json::to_value(p.status).expect("status serializes")));
            row
        })
        .collect();
    let mut tables = vec![Table { name: "pins".into(), header, rows }];
    if let Some(ex) = &report.exceptional {
        let levels: Vec<Value> = ex.levels.iter().map(|l| serde_json::to_value(l).expect("level serializes")).collect();
        tables.push(Table::from_objects("exceptional", &levels));
    }
    tables
}

fn file_safe(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Writes `<stem>.json` and `<stem>_<table>.csv` into `dir`.
pub fn write_report<S: Serialize>(dir: &Path, stem: &str, value: &S, tables: &[Table]) -> Result<Vec<PathBuf>, ConfigError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| ConfigError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let json = dir.join(format!("{stem}.json"));
    std::fs::write(&json, to_json_string(value)?).map_err(io(&json))?;
    written.push(json);
    for t in tables {
        let path = dir.join(format!("{stem}_{}.csv", file_safe(&t.name)));
        std::fs::write(&path, t.to_csv_string()?).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn objects_become_rows() {
        let t = Table::from_objects("t", &[json!({"b": 1.5, "a": [1, 2]}), json!({"a": "x", "b": null})]);
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.to_csv_string().unwrap(), "a,b\n1;2,1.5\nx,\n");
    }

    #[test]
    fn names_are_sanitised() {
        assert_eq!(file_safe("overlap high/dim"), "overlap_high_dim");
    }
}
