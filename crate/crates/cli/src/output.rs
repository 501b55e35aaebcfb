//! Deterministic CSV/JSON emission.
//!
//! CSV: fixed header per subcommand, comma-delimited, `.` decimal point,
//! LF line endings, floats rendered with 17 significant digits, fractions
//! as `p/q`. JSON: UTF-8, stable key order (struct field order), with a
//! `meta` block echoing the command and configuration. Identical
//! configuration must produce byte-identical bytes, so wall-clock timing is
//! reported on stderr only, never in the artifact.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    Str(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Str(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::UInt(v) => serde_json::json!(v),
            Cell::Float(v) => serde_json::json!(v),
            Cell::Str(s) => serde_json::json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Command echo carried in JSON output.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: &'static str,
    pub config: serde_json::Value,
    /// Set when the run ended early (series saturation); rows hold whatever
    /// was computed before the failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial: Option<String>,
}

/// A finished command: tabular rows plus summary scalars.
#[derive(Debug)]
pub struct CommandOutput {
    pub meta: Meta,
    pub summary: serde_json::Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl CommandOutput {
    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out.into_bytes()
            }
            Format::Json => {
                let rows: Vec<Vec<serde_json::Value>> =
                    self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
                let doc = serde_json::json!({
                    "meta": serde_json::to_value(&self.meta).expect("meta serializes"),
                    "summary": self.summary,
                    "columns": self.columns,
                    "rows": rows,
                });
                let mut bytes = serde_json::to_vec_pretty(&doc).expect("document serializes");
                bytes.push(b'\n');
                bytes
            }
        }
    }

    pub fn write(&self, format: Format, out_path: Option<&Path>) -> std::io::Result<()> {
        let bytes = self.render(format);
        match out_path {
            Some(path) => std::fs::write(path, bytes),
            None => std::io::stdout().write_all(&bytes),
        }
    }
}
