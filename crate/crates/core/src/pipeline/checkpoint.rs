//! Versioned, checksummed checkpoint files.
//!
//! A checkpoint is one JSON envelope: `{"schema_version", "checksum",
//! "state"}` where `checksum` is the SHA-256 hex digest of the state's
//! canonical JSON serialization. Writes go to a temp file in the target
//! directory followed by a rename, so a checkpoint is never observed
//! half-written.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::PipelineState;

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io_error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema_mismatch: checkpoint has version {found}, this build expects {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("corruption: {0}")]
    Corruption(String),
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema_version: u32,
    checksum: String,
    state: serde_json::Value,
}

fn digest_of(state_json: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(state_json.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Serialize the full state (including the RNG) atomically to `path`.
pub fn write_checkpoint(state: &PipelineState, path: &Path) -> Result<(), CheckpointError> {
    let io_err = |source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    };

    let state_value = serde_json::to_value(state)
        .map_err(|e| CheckpointError::Corruption(format!("state does not serialize: {e}")))?;
    let state_json = serde_json::to_string(&state_value)
        .map_err(|e| CheckpointError::Corruption(format!("state does not serialize: {e}")))?;
    let envelope = Envelope {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        checksum: digest_of(&state_json),
        state: state_value,
    };
    let bytes = serde_json::to_vec(&envelope)
        .map_err(|e| CheckpointError::Corruption(format!("envelope does not serialize: {e}")))?;

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Load a checkpoint written by [`write_checkpoint`]. Continuing a run from
/// the result is indistinguishable from never having stopped, given
/// deterministic backends.
pub fn resume(path: &Path) -> Result<PipelineState, CheckpointError> {
    let bytes = std::fs::read(path).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let envelope: Envelope = serde_json::from_slice(&bytes)
        .map_err(|e| CheckpointError::Corruption(format!("unreadable envelope: {e}")))?;

    if envelope.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(CheckpointError::SchemaMismatch {
            found: envelope.schema_version,
            expected: CHECKPOINT_SCHEMA_VERSION,
        });
    }

    let state_json = serde_json::to_string(&envelope.state)
        .map_err(|e| CheckpointError::Corruption(format!("state reserialization: {e}")))?;
    let digest = digest_of(&state_json);
    if digest != envelope.checksum {
        return Err(CheckpointError::Corruption(format!(
            "checksum mismatch: stored {}, computed {digest}",
            envelope.checksum
        )));
    }

    let mut state: PipelineState = serde_json::from_value(envelope.state)
        .map_err(|e| CheckpointError::Corruption(format!("state does not parse: {e}")))?;
    state.pool.rebuild();
    state.index.rebuild();
    Ok(state)
}
