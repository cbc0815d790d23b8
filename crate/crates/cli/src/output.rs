use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

/// A command result: the JSON document, and optionally a natural table.
/// Without a table, CSV and table output list the flattened JSON as
/// `key,value` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub value: Value,
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Payload {
    pub fn json(value: Value) -> Self {
        Self { value, table: None }
    }

    pub fn with_table(mut self, columns: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some((columns.iter().map(|c| c.to_string()).collect(), rows));
        self
    }

    fn rows(&self) -> (Vec<String>, Vec<Vec<String>>) {
        match &self.table {
            Some(t) => t.clone(),
            None => {
                let mut rows = Vec::new();
                flatten("", &self.value, &mut rows);
                (vec!["key".into(), "value".into()], rows)
            }
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let (columns, rows) = self.rows();
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&columns).map_err(io)?;
                for row in rows {
                    w.write_record(&row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
            }
            Format::Table => {
                let (columns, rows) = self.rows();
                let mut widths: Vec<usize> = columns.iter().map(|c| c.len()).collect();
                for row in &rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let mut out = String::new();
                let line = |out: &mut String, cells: &[String]| {
                    let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                    let _ = writeln!(out, "{}", padded.join("  ").trim_end());
                };
                line(&mut out, &columns);
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                line(&mut out, &rule);
                for row in &rows {
                    line(&mut out, row);
                }
                Ok(out)
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Dotted-path flattening; arrays of scalars become one `;`-joined cell.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, rows);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            rows.push(vec![prefix.to_string(), joined.join(";")]);
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, rows);
            }
        }
        other => rows.push(vec![prefix.to_string(), scalar(other)]),
    }
}
