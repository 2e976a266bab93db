//! CSV and JSON writers. Both embed the resolved config; CSV as a leading
//! `#` comment line, JSON as the `config` field.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no NaN; non-finite values become null.
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// A table plus named scalar fields (kept only in JSON output).
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub fields: Map<String, Value>,
}

impl Output {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn field(&mut self, name: &str, value: Value) {
        self.fields.insert(name.to_owned(), value);
    }

    pub fn render(&self, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
        let cfg_json = serde_json::to_value(cfg).expect("config serializes");
        match cfg.format() {
            Format::Csv => {
                let mut buf = format!("# brownflow {} config: {}\n", env!("CARGO_PKG_VERSION"), cfg_json).into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut buf);
                    let to_usage = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
                    w.write_record(&self.columns).map_err(to_usage)?;
                    for row in &self.rows {
                        w.write_record(row.iter().map(Cell::csv)).map_err(to_usage)?;
                    }
                    w.flush().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
                }
                Ok(buf)
            }
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
                doc.insert("config".into(), cfg_json);
                for (k, v) in &self.fields {
                    doc.insert(k.clone(), v.clone());
                }
                doc.insert("columns".into(), json!(self.columns));
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                doc.insert("rows".into(), Value::Array(rows));
                let mut buf = serde_json::to_vec_pretty(&Value::Object(doc)).expect("json serializes");
                buf.push(b'\n');
                Ok(buf)
            }
        }
    }

    /// Writes to the configured output path, or stdout when none is set.
    pub fn emit(&self, cfg: &RunConfig) -> Result<(), CliError> {
        let bytes = self.render(cfg)?;
        match &cfg.output {
            Some(path) => write_file(path, &bytes),
            None => io::stdout()
                .lock()
                .write_all(&bytes)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
