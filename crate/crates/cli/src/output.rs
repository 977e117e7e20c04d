use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Report { file: file.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal, scientific outside [1e−5, 1e16); non-finite values are written as NA.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else if v.is_finite() {
        format!("{v}")
    } else {
        "NA".to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NA".to_string())
}

/// SHA-256 over the config bytes and the seed offset.
pub fn config_hash(config_text: &str, seed_offset: u64) -> String {
    let mut h = Sha256::new();
    h.update(config_text.as_bytes());
    h.update(b"\nseed-offset=");
    h.update(seed_offset.to_string().as_bytes());
    hex::encode(h.finalize())
}

pub fn header_line(hash: &str) -> String {
    format!("# anderson-chaos v{VERSION} config-hash={hash}\n")
}

/// Writes the header comment, then an RFC 4180 table.
pub fn write_report(dir: &Path, report: &Report, hash: &str) -> std::io::Result<PathBuf> {
    let mut buf = header_line(hash).into_bytes();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(&report.header)?;
        for row in &report.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    let path = dir.join(&report.file);
    fs::write(&path, buf)?;
    Ok(path)
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub seed_offset: u64,
    pub threads: usize,
    pub status: String,
    pub message: Option<String>,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
    pub wall_time_seconds: f64,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> std::io::Result<PathBuf> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}
