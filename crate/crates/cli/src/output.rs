//! Writing reports with their parameter headers.

use crate::Failure;
use cesaro_lab::report::Csv;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

/// Resolved parameters, in the order they were recorded.
#[derive(Debug, Clone, Default)]
pub struct Params(Vec<(String, String)>);

impl Params {
    pub fn new(command: &str, seed: u64) -> Self {
        let mut p = Params::default();
        p.set("command", command).set("seed", seed);
        p
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn csv(&self) -> Csv {
        let mut csv = Csv::new();
        for (k, v) in &self.0 {
            csv.comment(k, v);
        }
        csv
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn write_csv(out: &Option<PathBuf>, csv: &Csv) -> Result<(), Failure> {
    emit(out, &csv.finish())
}

/// `{"params": {...}, "result": ...}`.
pub fn write_json(
    out: &Option<PathBuf>,
    params: &Params,
    result: &impl Serialize,
) -> Result<(), Failure> {
    let map: serde_json::Map<String, serde_json::Value> = params
        .0
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    let doc = serde_json::json!({ "params": map, "result": result });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Input(e.to_string()))?;
    text.push('\n');
    emit(out, &text)
}
