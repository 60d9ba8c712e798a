//! Provenance record attached to every run.

use serde::{Deserialize, Serialize};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One active constraint, with the source wording it encodes when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub name: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quote: Option<String>,
}

impl FilterRecord {
    pub fn new(name: impl Into<String>, value: impl ToString, quote: Option<&str>) -> Self {
        FilterRecord {
            name: name.into(),
            value: value.to_string(),
            quote: quote.map(str::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every resolved parameter; feeding this back in reproduces the run.
    pub parameters: serde_json::Value,
    pub engine_version: String,
    pub filters: Vec<FilterRecord>,
    pub elapsed_ms: u128,
    pub counts: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.into(),
            parameters,
            engine_version: ENGINE_VERSION.to_string(),
            filters: Vec::new(),
            elapsed_ms: 0,
            counts: serde_json::Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn count(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.counts.insert(key.to_string(), value.into());
    }

    pub fn filter(&self, name: &str) -> Option<&FilterRecord> {
        self.filters.iter().find(|f| f.name == name)
    }
}
