use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_VERSION: u32 = 1;

/// Seed of `stage`, derived from the root seed.
pub fn stage_seed(root: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(root.to_le_bytes());
    h.update(stage.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub seed: Option<u64>,
    /// Path to sha256, for every file read.
    pub inputs: BTreeMap<String, String>,
    /// Path (relative to the run directory) to sha256.
    pub outputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub root_seed: u64,
    pub stages: BTreeMap<String, StageRecord>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(config: serde_json::Value, root_seed: u64) -> Self {
        Self {
            version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            root_seed,
            stages: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Option<Self> {
        serde_json::from_str(&std::fs::read_to_string(path).ok()?).ok()
    }

    pub fn record(&mut self, stage: &str, record: StageRecord) {
        self.stages.insert(stage.to_string(), record);
        self.warnings = self
            .stages
            .iter()
            .flat_map(|(s, r)| r.warnings.iter().map(move |w| format!("{s}: {w}")))
            .collect();
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}
