//! CSV tables and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Task, SCHEMA_VERSION};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Cell {
    F(f64),
    U(u64),
    I(i64),
    B(bool),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<Option<u64>> for Cell {
    fn from(v: Option<u64>) -> Self {
        match v {
            Some(s) => Cell::U(s),
            None => Cell::S(String::new()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        w.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// JSON number, or `"inf"`/`"-inf"`/`"nan"` for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// Everything one task produces.
pub struct Artifacts {
    pub tables: Vec<(String, Table)>,
    pub results: Value,
    /// One-line human summary for stdout.
    pub headline: String,
}

pub fn write_all(out: &Path, task: Task, config: &RunConfig, artifacts: &Artifacts) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut names = Vec::new();
    for (name, table) in &artifacts.tables {
        let path = out.join(format!("{name}.csv"));
        table.write(&path)?;
        names.push(json!({ "file": format!("{name}.csv"), "columns": table.header }));
        written.push(path);
    }
    let summary = json!({
        "tool": "scarsense",
        "schema_version": SCHEMA_VERSION,
        "task": task.name(),
        "config": config,
        "tables": names,
        "results": artifacts.results,
    });
    let path = out.join(format!("{}.json", task.name()));
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}
