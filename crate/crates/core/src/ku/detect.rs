use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use log::warn;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::facts::{Fact, FactStream};
use super::parse::parse_named;
use super::resolve::Resolver;
use super::rules::{in_packages, Matcher, Ruleset, TypeScope};
use super::symbols::SymbolIndex;
use super::{KuError, KuVector};

fn matches(matcher: &Matcher, fact: &Fact, resolver: &Resolver) -> bool {
    let index = resolver.index();
    match matcher {
        Matcher::NodeKind { kinds } => kinds.contains(&fact.kind),
        Matcher::Modifier { kinds, all, any } => {
            kinds.contains(&fact.kind)
                && fact.flags.contains(*all)
                && (any.is_empty() || fact.flags.intersects(*any))
        }
        Matcher::TypeRef {
            roles,
            names,
            packages,
            scope,
        } => {
            if !roles.contains(&fact.kind) {
                return false;
            }
            let Some(fq) = fact.name.as_deref().and_then(|n| resolver.resolve(n)) else {
                return false;
            };
            if !index.accepts(&fq) {
                return false;
            }
            match scope {
                TypeScope::Named => names.contains(&fq) || in_packages(&fq, packages),
                TypeScope::AnyResolved => true,
                TypeScope::ProjectAbstract => index.abstract_types.contains(&fq),
            }
        }
        Matcher::Annotation { names, packages } => {
            let Some(fq) = fact.name.as_deref().and_then(|n| resolver.resolve(n)) else {
                return false;
            };
            index.accepts(&fq) && (names.contains(&fq) || in_packages(&fq, packages))
        }
        Matcher::MethodCall {
            receivers,
            receiver_packages,
            methods,
            any_receiver,
        } => {
            let method = fact.payload.as_deref().unwrap_or("");
            if !methods.is_empty() && !methods.contains(method) {
                return false;
            }
            if *any_receiver {
                return true;
            }
            let Some(ty) = fact.receiver.as_ref().and_then(|r| resolver.receiver_type(r)) else {
                return false;
            };
            index.accepts(&ty) && (receivers.contains(&ty) || in_packages(&ty, receiver_packages))
        }
    }
}

/// Count KU occurrences in one parsed file.
///
/// Each fact contributes at most one count per capability, however many rules
/// of that capability it satisfies.
pub fn detect_kus(facts: &FactStream, index: &SymbolIndex, rules: &Ruleset) -> KuVector {
    let mut out = KuVector::zero();
    for_each_hit(facts, index, rules, |_, ri| out.increment(rules.rules[ri].ku));
    out
}

/// Matches per capability label, e.g. `{"K4.C1": 2}`.
pub fn capability_hits(facts: &FactStream, index: &SymbolIndex, rules: &Ruleset) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for_each_hit(facts, index, rules, |_, ri| {
        *out.entry(rules.rules[ri].capability.clone()).or_default() += 1;
    });
    out
}

fn for_each_hit(
    facts: &FactStream,
    index: &SymbolIndex,
    rules: &Ruleset,
    mut hit: impl FnMut(&Fact, usize),
) {
    let resolver = Resolver::new(facts, index, &rules.known_names);
    let mut seen: Vec<usize> = Vec::new();
    for fact in facts.iter() {
        seen.clear();
        for &ri in &rules.by_kind[fact.kind as usize] {
            let cap = rules.rule_capability[ri];
            if seen.contains(&cap) {
                continue;
            }
            if matches(&rules.rules[ri].matcher, fact, &resolver) {
                seen.push(cap);
                hit(fact, ri);
            }
        }
    }
}

/// Parse and detect in one step.
pub fn detect_source(text: &str, index: &SymbolIndex, rules: &Ruleset) -> Result<KuVector, KuError> {
    let facts = super::parse::parse_source(text)?;
    Ok(detect_kus(&facts, index, rules))
}

type Digest32 = [u8; 32];

/// Detection with parse results memoized by content digest, so the same file
/// content seen in many snapshots is parsed once.
pub struct Detector {
    rules: Arc<Ruleset>,
    facts: RwLock<HashMap<Digest32, Option<Arc<FactStream>>>>,
}

impl Detector {
    pub fn new(rules: Ruleset) -> Self {
        Self {
            rules: Arc::new(rules),
            facts: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_default_rules() -> Self {
        Self::new(Ruleset::builtin().clone())
    }

    pub fn rules(&self) -> &Ruleset {
        &self.rules
    }

    /// Parsed facts of `text`; `None` (with a logged warning) if unparseable.
    pub fn facts(&self, path: &str, text: &str) -> Option<Arc<FactStream>> {
        let key: Digest32 = Sha256::digest(text.as_bytes()).into();
        if let Some(hit) = self.facts.read().unwrap().get(&key) {
            return hit.clone();
        }
        let parsed = match parse_named(path, text) {
            Ok(s) => Some(Arc::new(s)),
            Err(e) => {
                warn!("skipping {e}");
                None
            }
        };
        self.facts.write().unwrap().insert(key, parsed.clone());
        parsed
    }

    /// Symbol index over a snapshot's Java files.
    pub fn index<S: AsRef<str> + Sync>(&self, files: &BTreeMap<String, S>) -> SymbolIndex {
        let streams: Vec<Arc<FactStream>> = files
            .par_iter()
            .filter(|(p, _)| p.ends_with(".java"))
            .filter_map(|(p, t)| self.facts(p, t.as_ref()))
            .collect();
        SymbolIndex::from_streams(streams.iter().map(|s| s.as_ref()))
    }

    pub fn detect_file(&self, path: &str, text: &str, index: &SymbolIndex) -> KuVector {
        self.facts(path, text)
            .map(|f| detect_kus(&f, index, &self.rules))
            .unwrap_or_default()
    }

    /// Per-file KU vectors of the listed paths of a snapshot.
    pub fn detect_paths<S: AsRef<str> + Sync>(
        &self,
        files: &BTreeMap<String, S>,
        paths: &[&str],
        index: &SymbolIndex,
    ) -> Vec<KuVector> {
        paths
            .par_iter()
            .map(|p| match files.get(*p) {
                Some(text) if p.ends_with(".java") => self.detect_file(p, text.as_ref(), index),
                _ => KuVector::zero(),
            })
            .collect()
    }

    /// Sum over every Java file of a snapshot.
    pub fn detect_snapshot<S: AsRef<str> + Sync>(&self, files: &BTreeMap<String, S>) -> KuVector {
        let index = self.index(files);
        files
            .par_iter()
            .filter(|(p, _)| p.ends_with(".java"))
            .map(|(p, t)| self.detect_file(p, t.as_ref(), &index))
            .reduce(KuVector::zero, |a, b| a + b)
    }

    pub fn cached_files(&self) -> usize {
        self.facts.read().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ku::{KuId, parse_source};

    fn detect(src: &str) -> KuVector {
        let facts = parse_source(src).unwrap();
        let index = SymbolIndex::from_streams([&facts]);
        detect_kus(&facts, &index, Ruleset::builtin())
    }

    fn ku(n: usize) -> KuId {
        KuId::new(n).unwrap()
    }

    #[test]
    fn empty_stream_is_zero() {
        let v = detect_kus(&FactStream::default(), &SymbolIndex::default(), Ruleset::builtin());
        assert!(v.is_zero());
    }

    #[test]
    fn abstract_class_and_method() {
        let v = detect("abstract class A { abstract void m(); }");
        assert_eq!(v.get(ku(6)), 2);
    }

    #[test]
    fn synchronized_block() {
        let v = detect("class A { void m(){ synchronized(this){} } }");
        assert!(v.get(ku(16)) >= 1);
    }

    #[test]
    fn third_party_references_never_count() {
        let platform = "import java.util.concurrent.ConcurrentHashMap; class A { ConcurrentHashMap<String, String> m = new ConcurrentHashMap<>(); }";
        let third = "import org.thirdparty.ConcurrentHashMap; class A { ConcurrentHashMap<String, String> m = new ConcurrentHashMap<>(); }";
        assert_eq!(detect(platform).get(ku(16)), 2);
        assert_eq!(detect(third).get(ku(16)), 0);
    }

    #[test]
    fn one_count_per_capability_per_fact() {
        // the static initializer satisfies two K5.C2 rules
        let v = detect("class A { static { } }");
        assert_eq!(v.get(ku(5)), 1);
    }

    #[test]
    fn jakarta_namespace_matches() {
        let v = detect("import jakarta.persistence.Entity; @Entity class A {}");
        assert_eq!(v.get(ku(19)), 1);
    }

    #[test]
    fn detector_memoizes_by_content() {
        let d = Detector::with_default_rules();
        let mut files = BTreeMap::new();
        files.insert("A.java".to_string(), "class A { void m(){ while(true){} } }".to_string());
        files.insert("B.java".to_string(), "class A { void m(){ while(true){} } }".to_string());
        files.insert("README.md".to_string(), "not java".to_string());
        let v = d.detect_snapshot(&files);
        assert_eq!(v.get(ku(4)), 2);
        assert_eq!(d.cached_files(), 1);
    }
}
