//! Declarative KU detection rules.
//!
//! A ruleset is a TOML document with a `version` field and a list of
//! `[[rule]]` tables:
//!
//! ```toml
//! version = 1
//!
//! [[rule]]
//! ku = "K4"
//! capability = "K4.C1"
//! matcher = "node_kind"          # node_kind | modifier | type_ref | annotation | method_call
//! kinds = ["while_statement"]
//! ```
//!
//! Matcher parameters:
//!
//! * `node_kind`: `kinds`.
//! * `modifier`: `kinds`, plus `all` and/or `any` lists of flag names
//!   (`public`, `static`, `abstract`, `has_params`, `in_enum`, ...).
//! * `type_ref`: `roles` (type-reference kinds; default all), `names`
//!   (fully qualified), `packages` (prefixes), `scope` (`named`,
//!   `any_resolved`, `project_abstract`).
//! * `annotation`: `names`, `packages`.
//! * `method_call`: `receivers`, `receiver_packages`, `methods` (empty means
//!   any method), `any_receiver` (skip the receiver check).
//!
//! Every `javax.` name or package also matches its `jakarta.` counterpart.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;

use super::facts::{flag_from_name, FactFlags, NodeKind};
use super::{KuError, KuId};

const DEFAULT_RULES: &str = include_str!("default_rules.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeScope {
    /// Name or package listed in the rule.
    Named,
    /// Any reference that resolves to a project or platform type.
    AnyResolved,
    /// A project interface or abstract class.
    ProjectAbstract,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matcher {
    NodeKind {
        kinds: Vec<NodeKind>,
    },
    Modifier {
        kinds: Vec<NodeKind>,
        all: FactFlags,
        any: FactFlags,
    },
    TypeRef {
        roles: Vec<NodeKind>,
        names: BTreeSet<String>,
        packages: Vec<String>,
        scope: TypeScope,
    },
    Annotation {
        names: BTreeSet<String>,
        packages: Vec<String>,
    },
    MethodCall {
        receivers: BTreeSet<String>,
        receiver_packages: Vec<String>,
        methods: BTreeSet<String>,
        any_receiver: bool,
    },
}

impl Matcher {
    /// Fact kinds this matcher can ever fire on.
    pub fn kinds(&self) -> Vec<NodeKind> {
        match self {
            Matcher::NodeKind { kinds } | Matcher::Modifier { kinds, .. } => kinds.clone(),
            Matcher::TypeRef { roles, .. } => roles.clone(),
            Matcher::Annotation { .. } => vec![NodeKind::Annotation],
            Matcher::MethodCall { .. } => vec![NodeKind::MethodInvocation],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuRule {
    pub ku: KuId,
    pub capability: String,
    pub matcher: Matcher,
}

/// A validated list of rules plus lookup tables derived from it.
#[derive(Debug, Clone)]
pub struct Ruleset {
    pub rules: Vec<KuRule>,
    /// Distinct capability labels, sorted.
    pub capabilities: Vec<String>,
    pub(crate) rule_capability: Vec<usize>,
    pub(crate) by_kind: Vec<Vec<usize>>,
    /// Fully qualified platform names mentioned by any rule.
    pub known_names: BTreeSet<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleset {
    version: u32,
    #[serde(default, rename = "rule")]
    rules: Vec<RawRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    ku: String,
    capability: String,
    matcher: String,
    #[serde(default)]
    kinds: Vec<NodeKind>,
    #[serde(default)]
    all: Vec<String>,
    #[serde(default)]
    any: Vec<String>,
    #[serde(default)]
    roles: Vec<NodeKind>,
    #[serde(default)]
    names: Vec<String>,
    #[serde(default)]
    packages: Vec<String>,
    #[serde(default)]
    scope: Option<String>,
    #[serde(default)]
    receivers: Vec<String>,
    #[serde(default)]
    receiver_packages: Vec<String>,
    #[serde(default)]
    methods: Vec<String>,
    #[serde(default)]
    any_receiver: bool,
    #[serde(default)]
    #[allow(dead_code)]
    note: Option<String>,
}

const TYPE_REF_KINDS: &[NodeKind] = &[
    NodeKind::ExtendsRef,
    NodeKind::ImplementsRef,
    NodeKind::VariableTypeRef,
    NodeKind::ParameterTypeRef,
    NodeKind::ReturnTypeRef,
    NodeKind::CreationTypeRef,
    NodeKind::CastTypeRef,
    NodeKind::ThrowsRef,
    NodeKind::CatchTypeRef,
    NodeKind::TypeArgumentRef,
    NodeKind::StaticReceiverRef,
    NodeKind::OtherTypeRef,
];

fn with_jakarta(names: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(names.len() * 2);
    for n in names {
        if let Some(rest) = n.strip_prefix("javax.") {
            out.push(format!("jakarta.{rest}"));
        }
        out.push(n);
    }
    out
}

fn flags(names: &[String], ctx: &str) -> Result<FactFlags, KuError> {
    names.iter().try_fold(FactFlags::empty(), |acc, n| {
        flag_from_name(n)
            .map(|f| acc | f)
            .ok_or_else(|| KuError::Ruleset(format!("{ctx}: unknown flag `{n}`")))
    })
}

fn valid_capability(ku: KuId, cap: &str) -> bool {
    let Some((k, c)) = cap.split_once('.') else {
        return false;
    };
    KuId::parse(k) == Some(ku)
        && c.len() > 1
        && (c.starts_with('C') || c.starts_with('S'))
        && c[1..].chars().all(|ch| ch.is_ascii_digit())
}

impl RawRule {
    fn compile(self, at: usize) -> Result<KuRule, KuError> {
        let ctx = format!("rule #{at} ({})", self.capability);
        let ku = KuId::parse(&self.ku)
            .ok_or_else(|| KuError::Ruleset(format!("{ctx}: bad ku `{}`", self.ku)))?;
        if !valid_capability(ku, &self.capability) {
            return Err(KuError::Ruleset(format!(
                "{ctx}: capability must look like `{ku}.C<n>` or `{ku}.S<n>`"
            )));
        }
        let need = |cond: bool, what: &str| {
            if cond {
                Ok(())
            } else {
                Err(KuError::Ruleset(format!("{ctx}: {what}")))
            }
        };
        let matcher = match self.matcher.as_str() {
            "node_kind" => {
                need(!self.kinds.is_empty(), "node_kind needs `kinds`")?;
                Matcher::NodeKind { kinds: self.kinds }
            }
            "modifier" => {
                need(!self.kinds.is_empty(), "modifier needs `kinds`")?;
                let all = flags(&self.all, &ctx)?;
                let any = flags(&self.any, &ctx)?;
                need(!(all | any).is_empty(), "modifier needs `all` or `any`")?;
                Matcher::Modifier {
                    kinds: self.kinds,
                    all,
                    any,
                }
            }
            "type_ref" => {
                let scope = match self.scope.as_deref().unwrap_or("named") {
                    "named" => TypeScope::Named,
                    "any_resolved" => TypeScope::AnyResolved,
                    "project_abstract" => TypeScope::ProjectAbstract,
                    other => {
                        return Err(KuError::Ruleset(format!("{ctx}: unknown scope `{other}`")))
                    }
                };
                if scope == TypeScope::Named {
                    need(
                        !self.names.is_empty() || !self.packages.is_empty(),
                        "type_ref needs `names` or `packages`",
                    )?;
                }
                let roles = if self.roles.is_empty() {
                    TYPE_REF_KINDS.to_vec()
                } else {
                    self.roles
                };
                Matcher::TypeRef {
                    roles,
                    names: with_jakarta(self.names).into_iter().collect(),
                    packages: with_jakarta(self.packages),
                    scope,
                }
            }
            "annotation" => {
                need(
                    !self.names.is_empty() || !self.packages.is_empty(),
                    "annotation needs `names` or `packages`",
                )?;
                Matcher::Annotation {
                    names: with_jakarta(self.names).into_iter().collect(),
                    packages: with_jakarta(self.packages),
                }
            }
            "method_call" => {
                need(
                    self.any_receiver
                        || !self.receivers.is_empty()
                        || !self.receiver_packages.is_empty(),
                    "method_call needs receivers or `any_receiver = true`",
                )?;
                need(
                    !(self.any_receiver && self.methods.is_empty()),
                    "method_call with any_receiver needs `methods`",
                )?;
                Matcher::MethodCall {
                    receivers: with_jakarta(self.receivers).into_iter().collect(),
                    receiver_packages: with_jakarta(self.receiver_packages),
                    methods: self.methods.into_iter().collect(),
                    any_receiver: self.any_receiver,
                }
            }
            other => return Err(KuError::Ruleset(format!("{ctx}: unknown matcher `{other}`"))),
        };
        Ok(KuRule {
            ku,
            capability: self.capability,
            matcher,
        })
    }
}

/// Whether `name` lies in one of `packages` (prefix match on segment
/// boundaries, so `java.util` does not cover `java.utility`).
pub(crate) fn in_packages(name: &str, packages: &[String]) -> bool {
    packages.iter().any(|p| {
        name.len() > p.len() && name.starts_with(p.as_str()) && name.as_bytes()[p.len()] == b'.'
    })
}

impl Ruleset {
    pub fn new(rules: Vec<KuRule>) -> Self {
        let capabilities: Vec<String> = rules
            .iter()
            .map(|r| r.capability.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rule_capability = rules
            .iter()
            .map(|r| capabilities.binary_search(&r.capability).unwrap())
            .collect();
        let mut by_kind = vec![Vec::new(); NodeKind::OtherTypeRef as usize + 1];
        let mut known_names = BTreeSet::new();
        for (i, rule) in rules.iter().enumerate() {
            for k in rule.matcher.kinds() {
                by_kind[k as usize].push(i);
            }
            match &rule.matcher {
                Matcher::TypeRef { names, .. } | Matcher::Annotation { names, .. } => {
                    known_names.extend(names.iter().cloned())
                }
                Matcher::MethodCall { receivers, .. } => {
                    known_names.extend(receivers.iter().cloned())
                }
                _ => {}
            }
        }
        Self {
            rules,
            capabilities,
            rule_capability,
            by_kind,
            known_names,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, KuError> {
        let raw: RawRuleset =
            toml::from_str(text).map_err(|e| KuError::Ruleset(e.to_string()))?;
        if raw.version != 1 {
            return Err(KuError::Ruleset(format!(
                "unsupported ruleset version {}",
                raw.version
            )));
        }
        let rules = raw
            .rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.compile(i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(rules))
    }

    pub fn load(path: &Path) -> Result<Self, KuError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KuError::Ruleset(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The built-in ruleset, parsed once.
    pub fn builtin() -> &'static Ruleset {
        static RULES: OnceLock<Ruleset> = OnceLock::new();
        RULES.get_or_init(|| Ruleset::from_toml(DEFAULT_RULES).expect("built-in ruleset is valid"))
    }

    /// Text of the built-in ruleset, useful as a template for overrides.
    pub fn builtin_source() -> &'static str {
        DEFAULT_RULES
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Capabilities defined for `ku`.
    pub fn capabilities_of(&self, ku: KuId) -> Vec<&str> {
        let prefix = format!("{ku}.");
        self.capabilities
            .iter()
            .filter(|c| c.starts_with(&prefix))
            .map(String::as_str)
            .collect()
    }

    /// KUs without any rule.
    pub fn uncovered(&self) -> Vec<KuId> {
        KuId::all()
            .filter(|k| !self.rules.iter().any(|r| r.ku == *k))
            .collect()
    }
}

/// The built-in ruleset covering every capability row of the KU catalog.
pub fn default_ruleset() -> Ruleset {
    Ruleset::builtin().clone()
}
