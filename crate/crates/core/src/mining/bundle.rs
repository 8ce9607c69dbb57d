use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{
    dedup_paths, from_json_str, is_java, sort_commits, timestamp, CommitRecord, MiningError, Repository, Result,
    Snapshot,
};

pub const BUNDLE_VERSION: u32 = 1;

/// Self-contained repository history.
///
/// Commits are listed in history order. Each commit's `files` holds the
/// content of every file it adds or modifies, and `null` for deletions, so a
/// snapshot is the cumulative application of `files` up to that commit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitBundle {
    pub version: u32,
    pub project_id: String,
    pub commits: Vec<BundleCommit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleCommit {
    pub id: String,
    pub author_name: String,
    #[serde(with = "timestamp")]
    pub author_time: DateTime<Utc>,
    #[serde(default)]
    pub message: String,
    pub changed_paths: Vec<String>,
    #[serde(default)]
    pub files: BTreeMap<String, Option<String>>,
}

impl CommitBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

const CHECKPOINT_EVERY: usize = 64;

/// Repository backed by a [`CommitBundle`].
pub struct BundleRepository {
    project_id: String,
    commits: Vec<BundleCommit>,
    position: HashMap<String, usize>,
    checkpoints: OnceLock<Vec<Snapshot>>,
}

impl BundleRepository {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MiningError::RepoUnreadable(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: CommitBundle = from_json_str(text)?;
        Self::new(bundle)
    }

    pub fn new(bundle: CommitBundle) -> Result<Self> {
        if bundle.version != BUNDLE_VERSION {
            return Err(MiningError::SchemaError {
                line: 1,
                field: "version".into(),
                message: format!("unsupported bundle version {}", bundle.version),
            });
        }
        let mut position = HashMap::new();
        for (i, c) in bundle.commits.iter().enumerate() {
            if position.insert(c.id.clone(), i).is_some() {
                return Err(MiningError::SchemaError {
                    line: 0,
                    field: format!("commits[{i}].id"),
                    message: format!("duplicate commit id {}", c.id),
                });
            }
        }
        Ok(Self {
            project_id: bundle.project_id,
            commits: bundle.commits,
            position,
            checkpoints: OnceLock::new(),
        })
    }

    pub fn set_project_id(&mut self, id: String) {
        self.project_id = id;
    }

    fn apply(snapshot: &mut Snapshot, commit: &BundleCommit) {
        for (path, content) in &commit.files {
            match content {
                Some(text) => {
                    snapshot.insert(path.clone(), Arc::from(text.as_str()));
                }
                None => {
                    snapshot.remove(path);
                }
            }
        }
    }

    /// Snapshots before commits 0, 64, 128, ...
    fn checkpoints(&self) -> &[Snapshot] {
        self.checkpoints.get_or_init(|| {
            let mut out = Vec::new();
            let mut current = Snapshot::new();
            for (i, c) in self.commits.iter().enumerate() {
                if i % CHECKPOINT_EVERY == 0 {
                    out.push(current.clone());
                }
                Self::apply(&mut current, c);
            }
            out
        })
    }
}

impl Repository for BundleRepository {
    fn project_id(&self) -> &str {
        &self.project_id
    }

    fn enumerate_commits(&self) -> Result<Vec<CommitRecord>> {
        if self.commits.is_empty() {
            return Err(MiningError::EmptyRepository);
        }
        let mut out: Vec<CommitRecord> = self
            .commits
            .iter()
            .map(|c| {
                let mut changed_paths = c.changed_paths.clone();
                dedup_paths(&mut changed_paths);
                CommitRecord {
                    id: c.id.clone(),
                    author_name: c.author_name.clone(),
                    author_time: c.author_time,
                    message: c.message.clone(),
                    changed_paths,
                }
            })
            .collect();
        sort_commits(&mut out);
        Ok(out)
    }

    fn snapshot_files(&self, commit_id: &str) -> Result<Snapshot> {
        let &pos = self
            .position
            .get(commit_id)
            .ok_or_else(|| MiningError::UnknownCommit(commit_id.to_string()))?;
        let base = pos / CHECKPOINT_EVERY;
        let mut snap = self.checkpoints()[base].clone();
        for c in &self.commits[base * CHECKPOINT_EVERY..=pos] {
            Self::apply(&mut snap, c);
        }
        snap.retain(|p, _| is_java(p));
        Ok(snap)
    }
}
