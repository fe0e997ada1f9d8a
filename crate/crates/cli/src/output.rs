//! Serialization helpers: 9-significant-digit number formatting, the `inf`
//! literal, CSV assembly, and the run manifest accompanying every output
//! file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

/// Version of the CSV column layouts. Columns never reorder within a major
/// version.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Format a number with 9 significant digits, as plain decimal in moderate
/// ranges and scientific notation outside them. Infinities render as the
/// literal `inf`.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs();
    if (1e-4..1e9).contains(&magnitude) {
        let decimals = (8 - magnitude.log10().floor() as i32).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// JSON value carrying the same 9-significant-digit contract as the CSV
/// output; infinite rates become the string `"inf"`.
pub fn json_num(x: f64) -> Value {
    if x.is_infinite() {
        return Value::String("inf".into());
    }
    let rounded: f64 = fmt_sig9(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

/// Provenance record written next to every output file as
/// `<file>.manifest.json`. Re-running the recorded command reproduces the
/// file byte for byte (exact computations) or statistically at the recorded
/// seed (simulations reproduce byte for byte too, thread count included).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub artifact_version: &'static str,
    pub csv_schema_version: u32,
    pub created_utc: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION"),
            csv_schema_version: CSV_SCHEMA_VERSION,
            created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Assemble a CSV from a header and preformatted rows: UTF-8, comma
/// separators, LF line endings.
pub fn csv_document(header: &str, rows: &[String]) -> String {
    let mut doc = String::with_capacity(rows.len() * 64 + header.len() + 1);
    doc.push_str(header);
    doc.push('\n');
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    doc
}

/// Write an output file and its manifest. A failed write removes whatever
/// partial file was left behind.
pub fn write_output(path: &Path, contents: &str, manifest: &RunManifest) -> anyhow::Result<()> {
    if let Err(err) = fs::write(path, contents) {
        let _ = fs::remove_file(path);
        return Err(err).with_context(|| format!("writing {}", path.display()));
    }
    let mpath = manifest_path(path);
    let body = serde_json::to_string_pretty(manifest).context("serializing manifest")?;
    if let Err(err) = fs::write(&mpath, body + "\n") {
        let _ = fs::remove_file(&mpath);
        return Err(err).with_context(|| format!("writing {}", mpath.display()));
    }
    Ok(())
}
