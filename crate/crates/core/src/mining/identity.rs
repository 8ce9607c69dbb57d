use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{from_json_str, Result};

/// Hosting-platform account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub username: String,
    pub display_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IdentityLink {
    pub commit_author_name: String,
    pub account_username: String,
    pub display_name: String,
}

/// Profiles file: a JSON list of `{username, display_name}`.
pub fn load_profiles(path: &Path) -> Result<Vec<Profile>> {
    from_json_str(&std::fs::read_to_string(path)?)
}

/// Link commit author names to accounts whose display name is exactly equal.
/// Names matching more than one account are dropped.
pub fn link_identities<'a>(
    author_names: impl IntoIterator<Item = &'a str>,
    profiles: &[Profile],
) -> Vec<IdentityLink> {
    let mut by_display: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for p in profiles {
        by_display.entry(&p.display_name).or_default().insert(&p.username);
    }
    let names: BTreeSet<&str> = author_names.into_iter().collect();
    let mut links = Vec::new();
    for name in names {
        match by_display.get(name) {
            Some(users) if users.len() == 1 => links.push(IdentityLink {
                commit_author_name: name.to_string(),
                account_username: users.iter().next().unwrap().to_string(),
                display_name: name.to_string(),
            }),
            Some(users) => warn!("author {name:?} matches {} accounts; not linked", users.len()),
            None => {}
        }
    }
    links
}
