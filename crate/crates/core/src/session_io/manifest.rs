use super::{IoError, RunConfig};
use crate::world::WorldSpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to re-run a simulation: the resolved config, the
/// world text and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub config: RunConfig,
    pub world_text: String,
    pub world_hash: String,
    pub seed: u64,
    /// Log files, relative to the manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn world(&self) -> Result<WorldSpec, IoError> {
        let w = WorldSpec::parse(&self.world_text)?;
        if w.hash() != self.world_hash {
            return Err(IoError::Manifest(
                "world text does not match its hash".into(),
            ));
        }
        Ok(w)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| IoError::Manifest(format!("{}: {e}", path.display())))?;
        m.config.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        let text =
            serde_json::to_string_pretty(self).map_err(|e| IoError::Manifest(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| IoError::file(path, e))
    }
}
