//! Offline repository mining: commit histories, file snapshots, pull-request
//! bundles, identity links and developer/project pairs.

mod bundle;
mod git;
mod identity;
mod pairs;
mod pulls;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use bundle::{BundleCommit, BundleRepository, CommitBundle, BUNDLE_VERSION};
pub use git::GitRepository;
pub use identity::{link_identities, load_profiles, IdentityLink, Profile};
pub use pairs::{
    build_pairs, commits_in_window, initial_commit, previous_projects, DevProjectPair,
};
pub use pulls::{load_pr_bundle, parse_pr_bundle, Comment, PrBundle, PullRequest, PR_BUNDLE_VERSION};

pub const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, thiserror::Error)]
pub enum MiningError {
    #[error("repository unreadable: {0}")]
    RepoUnreadable(String),
    #[error("repository has no commits")]
    EmptyRepository,
    #[error("unknown commit {0}")]
    UnknownCommit(String),
    #[error("no commits by author {0:?}")]
    NoCommitsForAuthor(String),
    #[error("schema error at line {line}, field `{field}`: {message}")]
    SchemaError {
        line: usize,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MiningError>;

/// One commit of the default branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub id: String,
    pub author_name: String,
    #[serde(with = "timestamp")]
    pub author_time: DateTime<Utc>,
    pub message: String,
    pub changed_paths: Vec<String>,
}

impl CommitRecord {
    pub fn epoch(&self) -> i64 {
        self.author_time.timestamp()
    }

    /// Sort key of the canonical commit order.
    pub fn order_key(&self) -> (i64, &str) {
        (self.epoch(), self.id.as_str())
    }
}

/// File contents of one commit, keyed by repository-relative path.
pub type Snapshot = BTreeMap<String, Arc<str>>;

/// A source of commits and snapshots.
pub trait Repository: Send + Sync {
    fn project_id(&self) -> &str;

    /// All default-branch commits ordered by `(author_time, id)`.
    fn enumerate_commits(&self) -> Result<Vec<CommitRecord>>;

    /// Java files present at `commit_id`.
    fn snapshot_files(&self, commit_id: &str) -> Result<Snapshot>;
}

#[derive(Debug, Clone, Default)]
pub struct OpenOptions {
    /// Drop merge commits (git backend only; bundles carry no parent links).
    pub no_merges: bool,
    /// Overrides the project id derived from the path or bundle.
    pub project_id: Option<String>,
}

/// Open a commit bundle (a file) or a local git working tree (a directory).
pub fn open_repository(path: &Path, opts: &OpenOptions) -> Result<Box<dyn Repository>> {
    if path.is_file() {
        let mut repo = BundleRepository::load(path)?;
        if let Some(id) = &opts.project_id {
            repo.set_project_id(id.clone());
        }
        Ok(Box::new(repo))
    } else if path.is_dir() {
        Ok(Box::new(GitRepository::open(path, opts)?))
    } else {
        Err(MiningError::RepoUnreadable(path.display().to_string()))
    }
}

pub(crate) fn sort_commits(commits: &mut [CommitRecord]) {
    commits.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
}

pub(crate) fn dedup_paths(paths: &mut Vec<String>) {
    let mut seen = std::collections::HashSet::new();
    paths.retain(|p| seen.insert(p.clone()));
}

pub(crate) fn is_java(path: &str) -> bool {
    path.ends_with(".java")
}

/// ISO-8601 UTC timestamps truncated to whole seconds.
pub mod timestamp {
    use chrono::{DateTime, SecondsFormat, Timelike, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn parse(s: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
        let t = DateTime::parse_from_rfc3339(s)?.with_timezone(&Utc);
        Ok(t.with_nanosecond(0).unwrap_or(t))
    }

    pub fn format(t: &DateTime<Utc>) -> String {
        t.to_rfc3339_opts(SecondsFormat::Secs, true)
    }

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(|e| serde::de::Error::custom(format!("invalid timestamp {s:?}: {e}")))
    }
}

/// Deserialize a JSON document, reporting failures with a line number and
/// the path of the offending field.
pub(crate) fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        MiningError::SchemaError {
            line: inner.line(),
            field,
            message: inner.to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_are_utc_seconds() {
        let t = timestamp::parse("2020-03-01T10:00:00.750+02:00").unwrap();
        assert_eq!(timestamp::format(&t), "2020-03-01T08:00:00Z");
        assert!(timestamp::parse("yesterday").is_err());
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let mut p = vec!["b".to_string(), "a".into(), "b".into()];
        dedup_paths(&mut p);
        assert_eq!(p, vec!["b", "a"]);
    }
}
