use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a subcommand produces: a JSON view and a CSV table.
pub struct Report {
    pub results: Value,
    pub diagnostics: Option<Value>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Set by verification subcommands when the check fails.
    pub verified: bool,
}

impl Report {
    pub fn new(results: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Self {
            results,
            diagnostics: None,
            header,
            rows,
            verified: true,
        }
    }

    pub fn render(&self, format: Format, config: &Value) -> String {
        match format {
            Format::Json => {
                let doc = serde_json::json!({
                    "config": config,
                    "results": self.results,
                    "diagnostics": self.diagnostics.clone().unwrap_or(Value::Null),
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json output");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::new();
                let _ = writeln!(s, "# invsub {}", env!("CARGO_PKG_VERSION"));
                let _ = writeln!(s, "# config: {config}");
                if let Some(d) = &self.diagnostics {
                    let _ = writeln!(s, "# diagnostics: {d}");
                }
                s.push_str(&self.header.join(","));
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn num(x: f64) -> String {
    if !x.is_finite() {
        String::new()
    } else if x != 0.0 && (x.abs() < 1e-6 || x.abs() >= 1e16) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

