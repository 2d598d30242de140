//! JSON documents accepted by `stratlearn run`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use stratlearn::engine::SimulationConfig;

use crate::presets::PresetName;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("`{path}`: {message}")]
    Json { path: String, message: String },
    #[error("`{0}`: {1}")]
    Invalid(&'static str, String),
}

/// A request to expand and run one of the built-in experiment grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRequest {
    pub preset: PresetName,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Config(SimulationConfig),
    Preset(PresetRequest),
}

/// Parses and validates a configuration or preset document. Errors name the
/// offending key.
pub fn parse_config(text: &str) -> Result<Document, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Json { path: ".".into(), message: e.to_string() })?;
    let is_preset = value.as_object().is_some_and(|o| o.contains_key("preset"));
    if is_preset {
        let req: PresetRequest = from_value(value)?;
        if req.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds", "at least one seed is required".into()));
        }
        if req.horizon.is_some_and(|h| h < 2) {
            return Err(ConfigError::Invalid("horizon", "must be at least 2".into()));
        }
        if req.stride == Some(0) {
            return Err(ConfigError::Invalid("stride", "must be positive".into()));
        }
        return Ok(Document::Preset(req));
    }
    let config: SimulationConfig = from_value(value)?;
    config.validate().map_err(|e| match e {
        stratlearn::Error::InvalidParameter { name, reason } => ConfigError::Invalid(name, reason),
        other => ConfigError::Invalid("config", other.to_string()),
    })?;
    Ok(Document::Config(config))
}

fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Json { path, message: e.into_inner().to_string() }
    })
}

/// Pretty JSON that [`parse_config`] reads back to the same document.
pub fn emit_config(doc: &Document) -> String {
    match doc {
        Document::Config(c) => serde_json::to_string_pretty(c),
        Document::Preset(p) => serde_json::to_string_pretty(p),
    }
    .expect("config types serialize infallibly")
}
