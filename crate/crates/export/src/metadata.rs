use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use qsim_core::Circuit;

/// The only field that varies between identical runs.
pub const TIMESTAMP_FIELD: &str = "timestamp";

/// Run configuration echo written as `metadata.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    pub version: String,
    pub timestamp: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit_sha256: Option<String>,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            generator: "qsim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            command: command.into(),
            circuit_sha256: None,
            config,
            flags: Vec::new(),
        }
    }

    pub fn with_circuit(mut self, circuit: &Circuit) -> Self {
        self.circuit_sha256 = Some(circuit_hash(circuit));
        self
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }
}

/// SHA-256 of the canonical text form, as lowercase hex.
pub fn circuit_hash(circuit: &Circuit) -> String {
    Sha256::digest(circuit.to_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
