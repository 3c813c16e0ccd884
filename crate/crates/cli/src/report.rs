//! Report tables and summaries, and their on-disk form.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn format_number(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        // Drops the sign of negative zero.
        return "0".into();
    }
    format!("{r}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => number(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => number(n.as_f64().unwrap_or(0.0)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

/// A command's output: a fixed-column table and a scalar summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
}

impl Report {
    pub fn new(command: &'static str, header: &[&'static str]) -> Self {
        Self {
            command,
            header: header.to_vec(),
            rows: Vec::new(),
            summary: Value::Object(Map::new()),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).expect("summary value serializes");
        if let Value::Object(map) = &mut self.summary {
            map.insert(key.into(), round_json(v));
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut map = Map::new();
        map.insert("command".into(), Value::from(self.command));
        if let Value::Object(s) = &self.summary {
            map.extend(s.clone());
        }
        let mut text =
            serde_json::to_string_pretty(&Value::Object(map)).expect("summary serializes");
        text.push('\n');
        text
    }

    /// Summary plus the table as an array of row objects.
    pub fn full_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect(),
                )
            })
            .collect();
        let mut map = Map::new();
        map.insert("command".into(), Value::from(self.command));
        if let Value::Object(s) = &self.summary {
            map.extend(s.clone());
        }
        map.insert("rows".into(), Value::Array(rows));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
        text.push('\n');
        text
    }

    /// Writes `<command>.csv` and `<command>.json` (summary), or a single
    /// `<command>.json` holding both in JSON format. Returns the paths.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let files = match format {
            Format::Csv => vec![
                (dir.join(format!("{}.csv", self.command)), self.to_csv()),
                (
                    dir.join(format!("{}.json", self.command)),
                    self.summary_json(),
                ),
            ],
            Format::Json => vec![(dir.join(format!("{}.json", self.command)), self.full_json())],
        };
        let mut written = Vec::new();
        for (path, text) in files {
            fs::write(&path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}
