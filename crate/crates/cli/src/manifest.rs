//! Run manifests: the fully resolved configuration, tool version, wall
//! times and a digest of every file a run wrote.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{sha256_hex, write_atomic};
use sauter_core::SimulationConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Every configuration key with its resolved value, in the same text
    /// form the configuration file accepts.
    pub config: BTreeMap<String, String>,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub warnings: Vec<String>,
    /// Output file name → SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
    /// Run diagnostics (norm drift, yields, …).
    pub metrics: BTreeMap<String, f64>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(command: &str, config: &SimulationConfig, started_unix_s: f64) -> Self {
        let config = config
            .to_kv_string()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            started_unix_s,
            finished_unix_s: started_unix_s,
            warnings: Vec::new(),
            outputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
        }
    }

    /// The configuration as `key = value` text, ready for the config parser.
    pub fn config_text(&self) -> String {
        self.config
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Writes `bytes` atomically to `dir/name` and records its digest.
    pub fn write_output(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = dir.join(name);
        write_atomic(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// Stamps the finish time and writes `dir/manifest.json`.
    pub fn finish(self, dir: &Path) -> Result<Self, CliError> {
        self.finish_as(dir, MANIFEST_FILE)
    }

    /// As [`finish`](Self::finish) with a custom file name.
    pub fn finish_as(mut self, dir: &Path, name: &str) -> Result<Self, CliError> {
        self.finished_unix_s = unix_now();
        let path = dir.join(name);
        let mut text = serde_json::to_string_pretty(&self)
            .map_err(|e| CliError::Numerical(format!("manifest serialisation: {e}")))?;
        text.push('\n');
        write_atomic(&path, text.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        Ok(self)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("manifest: {e}")))
    }
}
