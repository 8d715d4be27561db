//! Pipeline configuration file.
//!
//! Every field has a default, so `{}` is a valid config. Command-line flags
//! override values read from the file, and the resolved result is written
//! next to each output as `<output>.config.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::PunctConfig;
use crate::model::{FeaturizerConfig, TrainConfig};
use crate::normalize::NormalizeConfig;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub normalize: NormalizeConfig,
    pub punct: PunctConfig,
    /// Named featurizer preset applied before `featurizer` overrides.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub featurizer: FeaturizerConfig,
    pub train: TrainConfig,
    pub paths: Paths,
}

impl PipelineConfig {
    /// Read a config file. With a `preset`, featurizer fields missing from
    /// the file come from the preset rather than the global defaults.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Data(message) => Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message,
            },
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Data(e.to_string()))?;
        let mut cfg: PipelineConfig =
            serde_json::from_value(value.clone()).map_err(|e| Error::Data(e.to_string()))?;
        if let Some(name) = cfg.preset.clone() {
            let mut base = serde_json::to_value(Self::featurizer_preset(&name)?).expect("serializes");
            if let (Some(obj), Some(over)) = (base.as_object_mut(), value.get("featurizer").and_then(|f| f.as_object())) {
                for (k, v) in over {
                    obj.insert(k.clone(), v.clone());
                }
            }
            cfg.featurizer = serde_json::from_value(base).map_err(|e| Error::Data(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn featurizer_preset(name: &str) -> Result<FeaturizerConfig, Error> {
        FeaturizerConfig::preset(name)
            .ok_or_else(|| Error::Data(format!("unknown preset `{name}` (known: default, paper-head)")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Write `<output>.config.json` next to `output`.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, Error> {
        let path = beside(output, "config.json");
        fs::write(&path, self.to_json() + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// `path` with `.suffix` appended to its full file name.
pub fn beside(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}
