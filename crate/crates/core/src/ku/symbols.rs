use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use super::facts::{FactFlags, FactStream, NodeKind};
use super::parse::parse_named;

pub const DEFAULT_PLATFORM_PREFIXES: &[&str] = &["java.", "javax.", "jakarta."];

/// Types declared by the project under analysis, plus the package prefixes
/// that count as the Java platform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolIndex {
    pub project_types: BTreeSet<String>,
    /// Project interfaces and abstract classes.
    pub abstract_types: BTreeSet<String>,
    pub platform_prefixes: Vec<String>,
}

impl Default for SymbolIndex {
    fn default() -> Self {
        Self {
            project_types: BTreeSet::new(),
            abstract_types: BTreeSet::new(),
            platform_prefixes: DEFAULT_PLATFORM_PREFIXES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl SymbolIndex {
    pub fn with_prefixes(mut self, prefixes: Vec<String>) -> Self {
        assert!(
            prefixes.iter().all(|p| p.len() > 1 && p.ends_with('.')),
            "platform prefixes must be non-empty and end in '.'"
        );
        self.platform_prefixes = prefixes;
        self
    }

    /// Index types from already-parsed files.
    pub fn from_streams<'a>(streams: impl IntoIterator<Item = &'a FactStream>) -> Self {
        let mut index = Self::default();
        for stream in streams {
            index.add_stream(stream);
        }
        index
    }

    pub fn add_stream(&mut self, stream: &FactStream) {
        let package = stream.package();
        for fact in stream.iter().filter(|f| f.kind.is_type_decl()) {
            let Some(path) = fact.payload.as_deref().or(fact.name.as_deref()) else {
                continue;
            };
            if path.is_empty() {
                continue;
            }
            let fq = match package {
                Some(p) => format!("{p}.{path}"),
                None => path.to_string(),
            };
            if fact.kind == NodeKind::InterfaceDecl || fact.flags.contains(FactFlags::ABSTRACT) {
                self.abstract_types.insert(fq.clone());
            }
            self.project_types.insert(fq);
        }
    }

    pub fn is_platform(&self, name: &str) -> bool {
        self.platform_prefixes.iter().any(|p| name.starts_with(p.as_str()))
    }

    /// A resolved reference counts only if it is a project or platform type.
    pub fn accepts(&self, name: &str) -> bool {
        self.project_types.contains(name) || self.is_platform(name)
    }
}

/// Index all type declarations across `files`; unparseable files are skipped
/// with a warning.
pub fn build_symbol_index(files: &BTreeMap<String, String>) -> SymbolIndex {
    let mut index = SymbolIndex::default();
    for (path, text) in files {
        match parse_named(path, text) {
            Ok(stream) => index.add_stream(&stream),
            Err(e) => warn!("skipping {path}: {e}"),
        }
    }
    index
}

#[cfg(test)]
mod tests {
    use super::*;

    fn files(entries: &[(&str, &str)]) -> BTreeMap<String, String> {
        entries
            .iter()
            .map(|(p, t)| (p.to_string(), t.to_string()))
            .collect()
    }

    #[test]
    fn empty_snapshot() {
        let idx = build_symbol_index(&BTreeMap::new());
        assert!(idx.project_types.is_empty());
        assert_eq!(idx.platform_prefixes, vec!["java.", "javax.", "jakarta."]);
    }

    #[test]
    fn single_declaration() {
        let idx = build_symbol_index(&files(&[("A.java", "package p; class A {}")]));
        assert_eq!(idx.project_types, BTreeSet::from(["p.A".to_string()]));
    }

    #[test]
    fn nested_types_are_qualified() {
        let idx = build_symbol_index(&files(&[
            ("p/A.java", "package p; public class A { static class Inner {} }"),
            ("p/B.java", "package p; interface B {}"),
        ]));
        let expected: BTreeSet<String> = ["p.A", "p.A.Inner", "p.B"].iter().map(|s| s.to_string()).collect();
        assert_eq!(idx.project_types, expected);
        assert!(idx.abstract_types.contains("p.B"));
    }

    #[test]
    fn unparseable_files_are_skipped() {
        let idx = build_symbol_index(&files(&[
            ("Bad.java", "class {"),
            ("Good.java", "class Good {}"),
        ]));
        assert_eq!(idx.project_types.len(), 1);
    }

    #[test]
    fn acceptance_rule() {
        let mut idx = SymbolIndex::default();
        idx.project_types.insert("p.A".into());
        assert!(idx.accepts("p.A"));
        assert!(idx.accepts("java.util.List"));
        assert!(idx.accepts("jakarta.persistence.Entity"));
        assert!(!idx.accepts("org.thirdparty.Widget"));
    }
}
