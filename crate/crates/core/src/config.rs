//! Run configuration file: one JSON document driving `generate`.
//!
//! Parsing is strict (unknown keys anywhere in the document are rejected)
//! and relative paths are resolved against the config file's directory, so a
//! config behaves the same from any working directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::PipelineConfig;
use crate::teacher::TeacherConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("io_error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config_error: {path}: {message}")]
    Parse { path: String, message: String },
}

/// The `generate` run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub seed_file: PathBuf,
    pub dataset_out: PathBuf,
    pub manifest_out: PathBuf,
    #[serde(default)]
    pub checkpoint_path: Option<PathBuf>,
    /// Checkpoint cadence in successful rounds; 0 disables periodic
    /// checkpoints (a final one is still written when a path is set).
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every_rounds: u64,
    pub pipeline: PipelineConfig,
    pub generator: TeacherConfig,
    pub judge: TeacherConfig,
}

fn default_checkpoint_every() -> u64 {
    1
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl RunConfigFile {
    /// Rewrite relative paths to be rooted at `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        self.seed_file = resolve(base, &self.seed_file);
        self.dataset_out = resolve(base, &self.dataset_out);
        self.manifest_out = resolve(base, &self.manifest_out);
        if let Some(ckpt) = &self.checkpoint_path {
            self.checkpoint_path = Some(resolve(base, ckpt));
        }
    }
}

/// Load and strictly parse a run config, resolving its relative paths.
pub fn load_run_config(path: &Path) -> Result<RunConfigFile, ConfigError> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: display.clone(),
        source,
    })?;
    let mut config: RunConfigFile =
        serde_json::from_str(&content).map_err(|e| ConfigError::Parse {
            path: display.clone(),
            message: e.to_string(),
        })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.resolve_paths(base);
    Ok(config)
}
