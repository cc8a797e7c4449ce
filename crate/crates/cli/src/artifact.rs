//! Artifact serialization: deterministic CSV/JSON files plus the run
//! manifest that records how to reproduce them.
//!
//! CSV cells hold floats at 17 significant digits (scientific notation),
//! which round-trips f64 exactly, so reruns with the same seed diff clean.
//! JSON goes through serde_json, whose float printing is also lossless.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use chanpure::qcore::ComplexMatrix;
use chanpure::tomography::{ChiMatrix, PauliTransferMatrix};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// 17 significant digits: 1 before the point, 16 after.
pub fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Assembles comma-separated rows with a header and LF line endings.
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        text
    }
}

/// Complex matrix as rows of `[re, im]` pairs.
pub fn matrix_json(m: &ComplexMatrix<f64>) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            let row: Vec<Value> = (0..m.cols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn chi_json(chi: &ChiMatrix<f64>) -> Value {
    json!({
        "n_qubits": chi.n_qubits(),
        "diagonal": chi.diagonal(),
        "entries": matrix_json(chi.entries()),
    })
}

pub fn ptm_json(ptm: &PauliTransferMatrix<f64>) -> Value {
    let n = ptm.size();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| ptm.entry(a, b)).collect())
        .collect();
    json!(rows)
}

/// Everything needed to rerun a command and get the same bytes back,
/// modulo the timestamp.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub command_line: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub tool_version: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            command_line: std::env::args().collect(),
            config,
            seed,
            artifacts: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Writes one artifact file under `out_dir`, creating the directory.
pub fn write_text(out_dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut file = fs::File::create(&path)?;
    file.write_all(content.as_bytes())?;
    Ok(path)
}

pub fn write_json(out_dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_text(out_dir, name, &text)
}

/// Writes `<command>_manifest.json` and returns its path.
pub fn write_manifest(out_dir: &Path, manifest: &RunManifest) -> Result<PathBuf, CliError> {
    let value = serde_json::to_value(manifest).expect("manifest serializes");
    write_json(out_dir, &format!("{}_manifest.json", manifest.command), &value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_lossless() {
        for x in [0.75, 1.0 / 3.0, 6.02e23, -1.23456789012345e-7, 0.0] {
            assert_eq!(fmt_f(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f(0.75), "7.5000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.push(vec!["1".into(), "2".into()]);
        assert_eq!(csv.to_text(), "a,b\n1,2\n");
        assert!(!csv.to_text().contains('\r'));
    }
}
