//! CSV/manifest writing helpers. CSV files start with `#`-prefixed metadata
//! comment lines (tool version, config digest, seed) so they stay
//! self-describing and plot-tool friendly; numbers are formatted with a fixed
//! 12 significant digits, locale-independent.

use super::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed 12-significant-digit scientific formatting.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

/// Provenance record written alongside each CSV output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub duration_ms: u128,
}

pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    pub fn new(command: &str, digest: &str, seed: Option<u64>, extra: &[(&str, String)]) -> Self {
        let mut lines = vec![
            format!("# tool: obf-rank v{TOOL_VERSION}"),
            format!("# command: {command}"),
            format!("# config_digest: {digest}"),
        ];
        if let Some(seed) = seed {
            lines.push(format!("# seed: {seed}"));
        }
        for (k, v) in extra {
            lines.push(format!("# {k}: {v}"));
        }
        CsvDoc { lines }
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.lines.push(columns.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    /// Write to `out` when given, otherwise to stdout; returns written paths.
    pub fn emit(&self, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
        match out {
            Some(path) => {
                std::fs::write(path, self.render()).map_err(|e| {
                    CliError::Input(format!("cannot write {}: {e}", path.display()))
                })?;
                Ok(vec![path.to_path_buf()])
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(self.render().as_bytes())
                    .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
                Ok(vec![])
            }
        }
    }
}

/// Write the manifest next to a CSV output as `<file>.manifest.json`.
pub fn write_manifest(csv_path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut path = csv_path.as_os_str().to_owned();
    path.push(".manifest.json");
    let path = PathBuf::from(path);
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Input(format!("manifest serialization: {e}")))?;
    std::fs::write(&path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
