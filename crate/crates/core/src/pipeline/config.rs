use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::SkEsdConfig;
use crate::labeling::{LabelRule, Setting};
use crate::learn::select::{DEFAULT_SPEARMAN_THRESHOLD, DEFAULT_VIF_THRESHOLD};
use crate::learn::{ModelKind, DEFAULT_REPETITIONS};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("path does not exist: {0}")]
    MissingPath(PathBuf),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub input: InputConfig,
    #[serde(default)]
    pub labels: LabelConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub ranking: SkEsdConfig,
    #[serde(default)]
    pub explain: ExplainConfig,
    /// Directory relative paths resolve against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_seed() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("run")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Directory holding `repos/`, `context/`, `prs/` and `profiles.json`.
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub repos: Vec<PathBuf>,
    /// Projects searched for previous work only.
    #[serde(default)]
    pub context_repos: Vec<PathBuf>,
    /// Pull-request bundle per project id.
    #[serde(default)]
    pub prs: BTreeMap<String, PathBuf>,
    pub profiles: Option<PathBuf>,
    /// CSV keyed by `project_id,developer` with baseline features.
    pub external_features: Option<PathBuf>,
    pub ruleset: Option<PathBuf>,
    #[serde(default)]
    pub no_merges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelConfig {
    pub settings: Vec<u32>,
    pub year_days: i64,
    pub percentile: f64,
}

impl Default for LabelConfig {
    fn default() -> Self {
        let rule = LabelRule::default();
        Self {
            settings: vec![1, 2, 3],
            year_days: rule.year_days,
            percentile: rule.percentile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub window_days: u32,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window_days: crate::features::WINDOW_DAYS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    pub spearman: f64,
    pub vif: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            spearman: DEFAULT_SPEARMAN_THRESHOLD,
            vif: DEFAULT_VIF_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationConfig {
    pub repetitions: usize,
    pub models: Vec<ModelKind>,
    /// Grid-search hyper-parameters inside every bootstrap repetition.
    pub tune: bool,
    /// Also score the first model on shuffled labels.
    pub permutation_control: bool,
    /// `model:baseline` pairs; model names omit the setting prefix.
    pub compare: Vec<String>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            repetitions: DEFAULT_REPETITIONS,
            models: vec![ModelKind::Rf],
            tune: false,
            permutation_control: true,
            compare: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExplainConfig {
    pub enabled: bool,
    pub model: ModelKind,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            model: ModelKind::Rf,
        }
    }
}

/// Input files after expanding `corpus` and resolving relative paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedInputs {
    pub repos: Vec<PathBuf>,
    pub context_repos: Vec<PathBuf>,
    pub prs: BTreeMap<String, PathBuf>,
    /// Directory searched for `<project_id>.json` when `prs` has no entry.
    pub prs_dir: Option<PathBuf>,
    pub profiles: PathBuf,
    pub external_features: Option<PathBuf>,
    pub ruleset: Option<PathBuf>,
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let entries = std::fs::read_dir(dir).map_err(|source| ConfigError::Read {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.check_values()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    fn check_values(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.labels.settings.is_empty() {
            return bad("labels.settings is empty".into());
        }
        for t in &self.labels.settings {
            if Setting::from_years(*t).is_none() {
                return bad(format!("labels.settings: {t} is not 1, 2 or 3"));
            }
        }
        if self.labels.year_days <= 0 {
            return bad("labels.year_days must be positive".into());
        }
        if !(0.0..=100.0).contains(&self.labels.percentile) {
            return bad("labels.percentile must lie in [0, 100]".into());
        }
        if self.features.window_days == 0 {
            return bad("features.window_days must be positive".into());
        }
        if !(self.selection.spearman > 0.0 && self.selection.spearman <= 1.0) {
            return bad("selection.spearman must lie in (0, 1]".into());
        }
        if self.selection.vif < 1.0 {
            return bad("selection.vif must be at least 1".into());
        }
        if self.evaluation.repetitions == 0 {
            return bad("evaluation.repetitions must be positive".into());
        }
        if self.evaluation.models.is_empty() {
            return bad("evaluation.models is empty".into());
        }
        for pair in &self.evaluation.compare {
            if pair.split_once(':').map_or(true, |(a, b)| a.is_empty() || b.is_empty()) {
                return bad(format!("evaluation.compare entry {pair:?} is not model:baseline"));
            }
        }
        if !(self.ranking.alpha > 0.0 && self.ranking.alpha < 1.0) || self.ranking.negligible < 0.0 {
            return bad("ranking.alpha must lie in (0, 1) and ranking.negligible be non-negative".into());
        }
        Ok(())
    }

    pub fn settings(&self) -> Vec<Setting> {
        let mut s: Vec<Setting> = self.labels.settings.iter().filter_map(|t| Setting::from_years(*t)).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn label_rule(&self) -> LabelRule {
        LabelRule {
            year_days: self.labels.year_days,
            percentile: self.labels.percentile,
        }
    }

    /// Expands the corpus directory and checks that every path exists.
    pub fn inputs(&self) -> Result<ResolvedInputs, ConfigError> {
        let must = |p: PathBuf| if p.exists() { Ok(p) } else { Err(ConfigError::MissingPath(p)) };
        let input = &self.input;
        let mut repos = Vec::new();
        let mut context_repos = Vec::new();
        let mut prs_dir = None;
        let mut profiles = None;
        if let Some(dir) = &input.corpus {
            let dir = must(self.resolve(dir))?;
            repos = json_files(&must(dir.join("repos"))?)?;
            let ctx = dir.join("context");
            if ctx.is_dir() {
                context_repos = json_files(&ctx)?;
            }
            let prs = dir.join("prs");
            if prs.is_dir() {
                prs_dir = Some(prs);
            }
            let p = dir.join("profiles.json");
            if p.exists() {
                profiles = Some(p);
            }
        }
        for r in &input.repos {
            repos.push(must(self.resolve(r))?);
        }
        for r in &input.context_repos {
            context_repos.push(must(self.resolve(r))?);
        }
        if let Some(p) = &input.profiles {
            profiles = Some(must(self.resolve(p))?);
        }
        let Some(profiles) = profiles else {
            return Err(ConfigError::Invalid("input.profiles is required".into()));
        };
        if repos.is_empty() {
            return Err(ConfigError::Invalid("no repositories given".into()));
        }
        let prs = input
            .prs
            .iter()
            .map(|(id, p)| Ok((id.clone(), must(self.resolve(p))?)))
            .collect::<Result<_, ConfigError>>()?;
        Ok(ResolvedInputs {
            repos,
            context_repos,
            prs,
            prs_dir,
            profiles,
            external_features: input.external_features.as_ref().map(|p| must(self.resolve(p))).transpose()?,
            ruleset: input.ruleset.as_ref().map(|p| must(self.resolve(p))).transpose()?,
        })
    }

    /// Settings and thresholds as recorded in the manifest.
    pub fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_toml("[input]\nrepos = [\"a.json\"]\n", Path::new("/tmp")).unwrap();
        assert_eq!(cfg.labels.settings, [1, 2, 3]);
        assert_eq!(cfg.features.window_days, 30);
        assert_eq!(cfg.evaluation.repetitions, 100);
        assert_eq!(cfg.evaluation.models, [ModelKind::Rf]);
        assert_eq!(cfg.resolve(Path::new("a.json")), PathBuf::from("/tmp/a.json"));
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(
            RunConfig::from_toml("[input]\nrepo = []\n", Path::new(".")),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            RunConfig::from_toml("[input]\n[labels]\nsettings = [4]\n", Path::new(".")),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            RunConfig::from_toml("[input]\n[evaluation]\ncompare = [\"rf\"]\n", Path::new(".")),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn missing_repo_is_named() {
        let cfg = RunConfig::from_toml(
            "[input]\nrepos = [\"nowhere.json\"]\nprofiles = \"p.json\"\n",
            Path::new("/definitely/not"),
        )
        .unwrap();
        match cfg.inputs() {
            Err(ConfigError::MissingPath(p)) => assert_eq!(p, PathBuf::from("/definitely/not/nowhere.json")),
            other => panic!("{other:?}"),
        }
    }
}
