//! Run manifests embedded in every artifact the command-line tool writes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::qubo::MuPolicy;
use crate::solve::SolverConfig;

/// Everything needed to rerun the command that produced an artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    /// Remaining subcommand-specific settings.
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub parameters: serde_json::Map<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            n_bins: None,
            k: None,
            epsilon: None,
            mu: None,
            solver: None,
            parameters: serde_json::Map::new(),
        }
    }

    pub fn parameter(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("parameter is serializable");
        self.parameters.insert(key.to_string(), value);
        self
    }

    /// Single-line JSON, as used in comment headers.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("manifest is serializable")
    }
}

/// Attaches `manifest` to a JSON object under the `"manifest"` key. Other
/// values are wrapped as `{"result": .., "manifest": ..}`.
pub fn with_manifest(value: serde_json::Value, manifest: &RunManifest) -> serde_json::Value {
    let manifest = serde_json::to_value(manifest).expect("manifest is serializable");
    match value {
        serde_json::Value::Object(mut map) => {
            map.insert("manifest".into(), manifest);
            serde_json::Value::Object(map)
        }
        other => serde_json::json!({ "result": other, "manifest": manifest }),
    }
}
