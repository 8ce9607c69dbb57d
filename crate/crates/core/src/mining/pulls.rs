use std::collections::HashSet;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{from_json_str, timestamp, MiningError, Result};

pub const PR_BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comment {
    pub author: String,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullRequest {
    pub pr_id: u64,
    pub author: String,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub changed_files: Vec<String>,
    #[serde(default)]
    pub comments: Vec<Comment>,
}

/// Versioned wrapper; a bare JSON list of pull requests is accepted too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrBundle {
    pub version: u32,
    #[serde(default)]
    pub project_id: Option<String>,
    pub pull_requests: Vec<PullRequest>,
}

pub fn load_pr_bundle(path: &Path) -> Result<Vec<PullRequest>> {
    parse_pr_bundle(&std::fs::read_to_string(path)?)
}

pub fn parse_pr_bundle(text: &str) -> Result<Vec<PullRequest>> {
    let prs: Vec<PullRequest> = if text.trim_start().starts_with('[') {
        from_json_str(text)?
    } else {
        let bundle: PrBundle = from_json_str(text)?;
        if bundle.version != PR_BUNDLE_VERSION {
            return Err(MiningError::SchemaError {
                line: 1,
                field: "version".into(),
                message: format!("unsupported PR bundle version {}", bundle.version),
            });
        }
        bundle.pull_requests
    };
    let mut seen = HashSet::new();
    for (i, pr) in prs.iter().enumerate() {
        if !seen.insert(pr.pr_id) {
            return Err(MiningError::SchemaError {
                line: 0,
                field: format!("[{i}].pr_id"),
                message: format!("duplicate pr_id {}", pr.pr_id),
            });
        }
    }
    Ok(prs)
}
