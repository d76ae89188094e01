//! CSV tables and JSON summaries.

use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner().context("flushing csv")?)?)
    }
}

/// Writes the primary artifact to `out` (stdout when absent) and the
/// summary next to it as `<out>.json`, or to stderr.
pub fn emit(out: Option<&Path>, artifact: &str, summary: Option<&serde_json::Value>) -> Result<()> {
    let summary_text = summary.map(|s| serde_json::to_string_pretty(s).expect("summary serialises") + "\n");
    match out {
        Some(path) => {
            std::fs::write(path, artifact).with_context(|| format!("writing {}", path.display()))?;
            if let Some(text) = summary_text {
                let sp = summary_path(path);
                std::fs::write(&sp, text).with_context(|| format!("writing {}", sp.display()))?;
            }
        }
        None => {
            std::io::stdout().write_all(artifact.as_bytes())?;
            if let Some(text) = summary_text {
                std::io::stderr().write_all(text.as_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn summary_path(out: &Path) -> std::path::PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("summary.json")
    } else {
        out.with_extension("json")
    }
}
