//! Run manifests: everything needed to reproduce an output file exactly.
//!
//! The manifest travels inside the output (a `manifest` field in JSON, a
//! `# manifest: ` comment line in CSV) and can be fed back with `--manifest`.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;

/// Version of the output layout; bumped on any incompatible change.
pub const FORMAT_VERSION: u32 = 1;

/// Prefix of the CSV comment line carrying the manifest.
pub const CSV_MANIFEST_PREFIX: &str = "# manifest: ";

/// RNG coordinates of one sample: the stream `stream` of the generator seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSeed {
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub format: u32,
    pub version: String,
    pub command: String,
    /// Seconds since the Unix epoch when the run was first made; kept on replay.
    pub timestamp: u64,
    pub config: ExperimentConfig,
    pub samples: Vec<SampleSeed>,
}

impl RunManifest {
    pub fn new(command: &str, config: ExperimentConfig, timestamp: Option<u64>) -> Self {
        let timestamp = timestamp.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            format: FORMAT_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp,
            config,
            samples: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// Reads a manifest from a bare manifest file, a JSON report holding a
    /// `manifest` field, or a CSV report with a manifest comment line.
    pub fn extract(text: &str) -> Result<Self, String> {
        if let Some(line) = text.lines().find_map(|l| l.strip_prefix(CSV_MANIFEST_PREFIX)) {
            return serde_json::from_str(line).map_err(|e| format!("manifest line: {e}"));
        }
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("manifest: {e}"))?;
        let inner = match value.get("manifest") {
            Some(m) => m.clone(),
            None => value,
        };
        let manifest: Self = serde_json::from_value(inner).map_err(|e| format!("manifest: {e}"))?;
        if manifest.format != FORMAT_VERSION {
            return Err(format!(
                "manifest format {} is not supported (expected {FORMAT_VERSION})",
                manifest.format
            ));
        }
        Ok(manifest)
    }
}
