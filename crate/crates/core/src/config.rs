//! Declarative run configuration (JSON), resolved relative to the config
//! file location.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{digest_parts, ProviderConfig, ProviderKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: PathBuf,
    #[serde(default)]
    pub inquiry_file: Option<PathBuf>,
    #[serde(default)]
    pub vocabulary_file: Option<PathBuf>,
    pub style_descriptions: PathBuf,
    pub providers: ProvidersConfig,
    #[serde(default)]
    pub analytics: AnalyticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvidersConfig {
    pub vision: ProviderConfig,
    /// Optional: without a synthesis model the rule-based extractor runs.
    #[serde(default)]
    pub synth: Option<ProviderConfig>,
    pub embeddings: Vec<ProviderConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsConfig {
    #[serde(default = "default_bin_width")]
    pub bin_width: u32,
    #[serde(default = "default_top_k")]
    pub crosstab_top_k: usize,
}

fn default_bin_width() -> u32 {
    10
}
fn default_top_k() -> usize {
    6
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        AnalyticsConfig {
            bin_width: default_bin_width(),
            crosstab_top_k: default_top_k(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default = "default_run_dir")]
    pub run_dir: PathBuf,
    /// Defaults to `<run_dir>/cache` when absent.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

fn default_run_dir() -> PathBuf {
    PathBuf::from("runs")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            run_dir: default_run_dir(),
            cache_dir: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid config json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        let mut config: RunConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.corpus);
        resolve(&mut self.style_descriptions);
        if let Some(p) = &mut self.inquiry_file {
            resolve(p);
        }
        if let Some(p) = &mut self.vocabulary_file {
            resolve(p);
        }
        resolve(&mut self.output.run_dir);
        if let Some(p) = &mut self.output.cache_dir {
            resolve(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.providers.vision.kind != ProviderKind::VisionChat {
            return Err(ConfigError::Invalid("providers.vision must have kind vision_chat".into()));
        }
        if let Some(synth) = &self.providers.synth {
            if synth.kind != ProviderKind::TextChat {
                return Err(ConfigError::Invalid("providers.synth must have kind text_chat".into()));
            }
            synth.validate().map_err(ConfigError::Invalid)?;
        }
        if self.providers.embeddings.is_empty() {
            return Err(ConfigError::Invalid("providers.embeddings must not be empty".into()));
        }
        for e in &self.providers.embeddings {
            if e.kind != ProviderKind::Embedding {
                return Err(ConfigError::Invalid("providers.embeddings entries must have kind embedding".into()));
            }
            e.validate().map_err(ConfigError::Invalid)?;
        }
        self.providers.vision.validate().map_err(ConfigError::Invalid)?;
        if self.analytics.bin_width < 1 {
            return Err(ConfigError::Invalid("analytics.bin_width must be >= 1".into()));
        }
        Ok(())
    }

    /// Stable digest of the resolved configuration, recorded in the run
    /// manifest for provenance.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        digest_parts(&["run-config", &canonical])
    }
}
