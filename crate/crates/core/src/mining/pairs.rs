use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{CommitRecord, IdentityLink, MiningError, Result, SECONDS_PER_DAY};

/// A linked developer in one project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevProjectPair {
    pub project_id: String,
    pub developer: IdentityLink,
    pub initial_commit: CommitRecord,
    pub previous_projects: Vec<String>,
}

/// Earliest commit by `author_name` (ties: smallest id).
pub fn initial_commit(commits: &[CommitRecord], author_name: &str) -> Result<CommitRecord> {
    commits
        .iter()
        .filter(|c| c.author_name == author_name)
        .min_by(|a, b| a.order_key().cmp(&b.order_key()))
        .cloned()
        .ok_or_else(|| MiningError::NoCommitsForAuthor(author_name.to_string()))
}

/// Commits by `author_name` in `[start, start + days)`.
pub fn commits_in_window(
    commits: &[CommitRecord],
    author_name: &str,
    start: DateTime<Utc>,
    days: u32,
) -> Vec<CommitRecord> {
    assert!(days > 0, "window must span at least one day");
    let lo = start.timestamp();
    let hi = lo + i64::from(days) * SECONDS_PER_DAY;
    commits
        .iter()
        .filter(|c| c.author_name == author_name && (lo..hi).contains(&c.epoch()))
        .cloned()
        .collect()
}

/// Projects in which the developer authored a commit strictly before
/// `initial_time`.
pub fn previous_projects(
    author_name: &str,
    initial_time: DateTime<Utc>,
    other_repos: &BTreeMap<String, Vec<CommitRecord>>,
) -> Vec<String> {
    other_repos
        .iter()
        .filter(|(_, commits)| {
            commits
                .iter()
                .any(|c| c.author_name == author_name && c.author_time < initial_time)
        })
        .map(|(id, _)| id.clone())
        .collect()
}

/// One pair per linked author with commits in the project. `other_repos` may
/// include the project itself; it is skipped when looking for previous work.
pub fn build_pairs(
    project_id: &str,
    commits: &[CommitRecord],
    links: &[IdentityLink],
    other_repos: &BTreeMap<String, Vec<CommitRecord>>,
) -> Vec<DevProjectPair> {
    let mut pairs = Vec::new();
    for link in links {
        let Ok(initial) = initial_commit(commits, &link.commit_author_name) else {
            continue;
        };
        let mut previous = previous_projects(&link.commit_author_name, initial.author_time, other_repos);
        previous.retain(|p| p != project_id);
        pairs.push(DevProjectPair {
            project_id: project_id.to_string(),
            developer: link.clone(),
            initial_commit: initial,
            previous_projects: previous,
        });
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::timestamp;

    fn c(id: &str, author: &str, secs: i64) -> CommitRecord {
        CommitRecord {
            id: id.into(),
            author_name: author.into(),
            author_time: DateTime::from_timestamp(secs, 0).unwrap(),
            message: String::new(),
            changed_paths: vec![],
        }
    }

    const DAY: i64 = SECONDS_PER_DAY;

    #[test]
    fn initial_commit_rules() {
        let commits = vec![c("x", "ada", 5 * DAY), c("y", "ada", 2 * DAY), c("z", "bob", 0)];
        assert_eq!(initial_commit(&commits, "ada").unwrap().id, "y");
        let tied = vec![c("ab", "ada", DAY), c("aa", "ada", DAY)];
        assert_eq!(initial_commit(&tied, "ada").unwrap().id, "aa");
        assert!(matches!(initial_commit(&commits, "cy"), Err(MiningError::NoCommitsForAuthor(_))));
    }

    #[test]
    fn window_is_half_open() {
        let t = 1_000 * DAY;
        let commits = vec![c("a", "ada", t), c("b", "ada", t + 29 * DAY), c("d", "ada", t + 30 * DAY), c("e", "bob", t)];
        let start = DateTime::from_timestamp(t, 0).unwrap();
        let ids: Vec<_> = commits_in_window(&commits, "ada", start, 30).into_iter().map(|c| c.id).collect();
        assert_eq!(ids, ["a", "b"]);
        let later = timestamp::parse("2100-01-01T00:00:00Z").unwrap();
        assert!(commits_in_window(&commits, "ada", later, 30).is_empty());
    }

    #[test]
    fn previous_projects_are_strictly_earlier() {
        let initial = DateTime::from_timestamp(100 * DAY, 0).unwrap();
        let mut repos = BTreeMap::new();
        assert!(previous_projects("ada", initial, &repos).is_empty());
        repos.insert("before".to_string(), vec![c("a", "ada", 99 * DAY)]);
        repos.insert("after".to_string(), vec![c("b", "ada", 100 * DAY + 1)]);
        repos.insert("same".to_string(), vec![c("c", "ada", 100 * DAY)]);
        repos.insert("other".to_string(), vec![c("d", "bob", 0)]);
        assert_eq!(previous_projects("ada", initial, &repos), ["before"]);
    }

    #[test]
    fn pairs_skip_the_studied_project() {
        let commits = vec![c("a", "Ada", 10 * DAY), c("b", "Bob", 20 * DAY)];
        let mut repos = BTreeMap::new();
        repos.insert("p".to_string(), commits.clone());
        repos.insert("q".to_string(), vec![c("z", "Ada", DAY)]);
        let links = vec![
            IdentityLink {
                commit_author_name: "Ada".into(),
                account_username: "ada".into(),
                display_name: "Ada".into(),
            },
            IdentityLink {
                commit_author_name: "Cy".into(),
                account_username: "cy".into(),
                display_name: "Cy".into(),
            },
        ];
        let pairs = build_pairs("p", &commits, &links, &repos);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].initial_commit.id, "a");
        assert_eq!(pairs[0].previous_projects, ["q"]);
    }
}
