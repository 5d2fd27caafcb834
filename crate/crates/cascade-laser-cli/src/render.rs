//! Output rendering. Every run emits a provenance block (the resolved
//! inputs, sufficient to reproduce the run) and a results block; numbers
//! are printed at 12 significant digits in both formats, so the CSV and
//! JSON renderings of one run carry identical values.

use std::env;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cascade_laser::scan::format_sig;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Field {
    pub fn text(s: impl Into<String>) -> Self {
        Field::Text(s.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// The printed 12-digit form, read back. JSON output goes through this so
/// it cannot carry more precision than the CSV rendering.
pub fn parse_back(x: f64) -> f64 {
    format_sig(x).parse().expect("format_sig emits valid f64")
}

fn csv_value(field: &Field) -> String {
    match field {
        Field::Num(x) => format_sig(*x),
        Field::Int(i) => i.to_string(),
        Field::Bool(b) => b.to_string(),
        Field::Text(s) => s.clone(),
    }
}

pub fn json_value(field: &Field) -> Value {
    match field {
        Field::Num(x) => serde_json::Number::from_f64(parse_back(*x))
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(format_sig(*x))),
        Field::Int(i) => Value::from(*i),
        Field::Bool(b) => Value::from(*b),
        Field::Text(s) => Value::from(s.as_str()),
    }
}

fn json_object(fields: &[(String, Field)]) -> Value {
    let mut obj = Map::new();
    for (k, v) in fields {
        obj.insert(k.clone(), json_value(v));
    }
    Value::Object(obj)
}

/// A scalar-record run: provenance plus named result values.
pub struct Report {
    pub provenance: Vec<(String, Field)>,
    pub results: Vec<(String, Field)>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                for (k, v) in &self.provenance {
                    out.push_str(&format!("# {k} = {}\n", csv_value(v)));
                }
                out.push_str("name,value\n");
                for (k, v) in &self.results {
                    out.push_str(&format!("{k},{}\n", csv_value(v)));
                }
                out
            }
            Format::Json => {
                let doc = json!({
                    "provenance": json_object(&self.provenance),
                    "results": json_object(&self.results),
                });
                let mut text = serde_json::to_string_pretty(&doc).expect("static structure");
                text.push('\n');
                text
            }
        }
    }
}

/// Relative output paths land under CASCADE_LASER_OUT_DIR when it is set.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match env::var_os("CASCADE_LASER_OUT_DIR") {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}

pub fn emit(text: &str, output: Option<&Path>) -> io::Result<()> {
    match output {
        None => io::stdout().write_all(text.as_bytes()),
        Some(path) => {
            let resolved = resolve_out_path(path);
            std::fs::write(&resolved, text).map_err(|e| {
                io::Error::new(e.kind(), format!("{}: {e}", resolved.display()))
            })
        }
    }
}
