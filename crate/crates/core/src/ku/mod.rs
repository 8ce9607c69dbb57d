//! Knowledge-unit detection for Java source.
//!
//! The pipeline is `parse_source` (tree-sitter walk into a [`FactStream`]),
//! `build_symbol_index` (project-declared types), and `detect_kus`, which
//! applies a declarative [`Ruleset`] to the facts of one file.

mod detect;
mod facts;
mod parse;
mod resolve;
mod rules;
mod symbols;

use std::fmt;
use std::ops::{Add, AddAssign, Index};

use serde::{Deserialize, Serialize};

pub use detect::{capability_hits, detect_kus, detect_source, Detector};
pub use facts::{flag_from_name, Fact, FactFlags, FactStream, NodeKind, Receiver, FLAG_NAMES};
pub use parse::{parse_named, parse_source};
pub use resolve::Resolver;
pub use rules::{default_ruleset, KuRule, Matcher, Ruleset, TypeScope};
pub use symbols::{build_symbol_index, SymbolIndex, DEFAULT_PLATFORM_PREFIXES};

/// Number of knowledge units in the catalog.
pub const KU_COUNT: usize = 28;

#[derive(Debug, thiserror::Error)]
pub enum KuError {
    #[error("{file}: parse error at byte {offset}: {message}")]
    Parse {
        file: String,
        offset: usize,
        message: String,
    },
    #[error("ruleset: {0}")]
    Ruleset(String),
}

/// Knowledge-unit identifier, `K1` through `K28`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KuId(u8);

impl KuId {
    pub fn new(n: usize) -> Option<Self> {
        (1..=KU_COUNT).contains(&n).then_some(Self(n as u8))
    }

    /// 1-based number.
    pub fn number(self) -> usize {
        self.0 as usize
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = KuId> {
        (1..=KU_COUNT).map(|n| KuId(n as u8))
    }

    pub fn parse(s: &str) -> Option<Self> {
        s.strip_prefix('K')?.parse().ok().and_then(Self::new)
    }
}

impl fmt::Display for KuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", self.0)
    }
}

/// Per-KU occurrence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct KuVector {
    pub counts: [u64; KU_COUNT],
}

impl KuVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [u64; KU_COUNT]) -> Self {
        Self { counts }
    }

    pub fn get(&self, ku: KuId) -> u64 {
        self.counts[ku.index()]
    }

    pub fn increment(&mut self, ku: KuId) {
        self.counts[ku.index()] += 1;
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> [f64; KU_COUNT] {
        self.counts.map(|c| c as f64)
    }

    /// CSV column names, `K1`..`K28`.
    pub fn header() -> Vec<String> {
        KuId::all().map(|k| k.to_string()).collect()
    }

    pub fn to_record(&self) -> Vec<String> {
        self.counts.iter().map(u64::to_string).collect()
    }

    /// Parse a "K3=2,K16=1" style sparse description; unmentioned KUs are 0.
    pub fn from_sparse(s: &str) -> Option<Self> {
        let mut v = Self::zero();
        for part in s.split(|c: char| c == ',' || c.is_whitespace()) {
            if part.is_empty() {
                continue;
            }
            let (k, n) = part.split_once('=')?;
            let k = KuId::parse(k.trim())?;
            v.counts[k.index()] = n.trim().parse().ok()?;
        }
        Some(v)
    }

    /// Inverse of [`from_sparse`](Self::from_sparse), listing nonzero entries.
    pub fn to_sparse(&self) -> String {
        KuId::all()
            .filter(|k| self.get(*k) > 0)
            .map(|k| format!("{k}={}", self.get(k)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl Index<KuId> for KuVector {
    type Output = u64;
    fn index(&self, ku: KuId) -> &u64 {
        &self.counts[ku.index()]
    }
}

impl Add for KuVector {
    type Output = KuVector;
    fn add(mut self, rhs: KuVector) -> KuVector {
        self += rhs;
        self
    }
}

impl AddAssign for KuVector {
    fn add_assign(&mut self, rhs: KuVector) {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts) {
            *a += b;
        }
    }
}

impl std::iter::Sum for KuVector {
    fn sum<I: Iterator<Item = KuVector>>(iter: I) -> KuVector {
        iter.fold(KuVector::zero(), |a, b| a + b)
    }
}
