//! Tabular reports rendered as CSV or versioned JSON.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Integer(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Number(v) => format_number(*v),
            Cell::Integer(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round through the printed form so CSV and JSON carry the same value.
            Cell::Number(v) => format_number(*v)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Integer(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Six decimals, or six significant digits in scientific form below `1e-3`.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.5e}")
    } else {
        format!("{v:.6}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, timestamp: Option<u64>) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.render_csv(timestamp),
            Format::Json => self.render_json(timestamp),
        }
    }

    fn render_csv(&self, timestamp: Option<u64>) -> io::Result<Vec<u8>> {
        let mut out = Vec::new();
        if let Some(t) = timestamp {
            writeln!(out, "# generated_unix={t}")?;
        }
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        drop(w);
        Ok(out)
    }

    fn render_json(&self, timestamp: Option<u64>) -> io::Result<Vec<u8>> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("schema".into(), Value::from(SCHEMA_VERSION));
        top.insert("command".into(), Value::from(self.command));
        if let Some(t) = timestamp {
            top.insert("generated_unix".into(), Value::from(t));
        }
        top.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|c| Value::from(*c)).collect()),
        );
        top.insert("rows".into(), Value::Array(rows));
        let mut out = serde_json::to_vec_pretty(&Value::Object(top))?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename,
/// so a failed run never leaves a partial report behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
