//! JSON and CSV rendering. Both encodings are produced from the same
//! `serde_json::Value`s, so they carry identical values.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A rectangular view of a report for CSV output.
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// One row from the top-level fields of a JSON object.
    pub fn from_object(v: &Value) -> Self {
        let obj = v.as_object().expect("reports are JSON objects");
        Table {
            columns: obj.keys().cloned().collect(),
            rows: vec![obj.values().cloned().collect()],
        }
    }

    /// One row per object in `items`, columns in the order given.
    pub fn from_rows(columns: &[&str], items: &[Value]) -> Self {
        let mut t = Table::new(columns);
        for item in items {
            t.rows.push(
                columns
                    .iter()
                    .map(|c| item.get(*c).cloned().unwrap_or(Value::Null))
                    .collect(),
            );
        }
        t
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self) -> io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render(format: Format, json: &Value, table: impl FnOnce() -> Table) -> io::Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => table().render(),
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
