//! Config files: flat `key = value` text whose keys mirror the long flags,
//! or a JSON document whose `provenance` object supplies the same keys.
//! Every emitted output is accepted back verbatim: `#` markers are
//! stripped, lines without `=` (column headers, data rows) are skipped.
//! Flags always override config values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    /// Parse `path` (when given) and reject keys the `subcommand` does not
    /// understand; a recorded `subcommand` key must match the one running.
    pub fn load(
        subcommand: &str,
        path: Option<&Path>,
        allowed: &[&str],
    ) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            if text.trim_start().starts_with('{') {
                parse_json(&text, &mut map)?;
            } else {
                parse_text(&text, &mut map)?;
            }
        }
        if let Some(sub) = map.remove("subcommand") {
            if sub != subcommand {
                return Err(CliError::Input(format!(
                    "config was recorded by `{sub}`, not `{subcommand}`"
                )));
            }
        }
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Input(format!(
                    "config key {key:?} is not used by `{subcommand}`"
                )));
            }
        }
        Ok(Settings { map })
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parse_with(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.parse_with(key, |v| v.parse::<u64>().ok())
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.parse_with(key, |v| v.parse::<usize>().ok())
    }

    fn parse_with<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => parse(v).map(Some).ok_or_else(|| {
                CliError::Input(format!("config value {key} = {v:?} does not parse"))
            }),
        }
    }
}

fn parse_text(text: &str, map: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    for raw in text.lines() {
        let line = raw.trim();
        let line = line.strip_prefix('#').unwrap_or(line).trim();
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() || key.contains(',') {
            return Err(CliError::Input(format!("malformed config line {raw:?}")));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(())
}

fn parse_json(text: &str, map: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    let doc: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("config is not valid JSON: {e}")))?;
    let root = doc
        .as_object()
        .ok_or_else(|| CliError::Input("JSON config must be an object".into()))?;
    let source = match root.get("provenance") {
        Some(serde_json::Value::Object(p)) => p,
        _ => root,
    };
    for (key, value) in source {
        let text = match value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            serde_json::Value::Null => continue,
            other => {
                return Err(CliError::Input(format!(
                    "config key {key:?} has non-scalar value {other}"
                )))
            }
        };
        map.insert(key.clone(), text);
    }
    Ok(())
}
