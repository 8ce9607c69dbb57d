//! End-to-end orchestration: configuration, run directories, manifests,
//! stage execution and reports.

mod config;
mod manifest;
mod report;
mod stages;
pub mod synth;

use std::path::{Path, PathBuf};

pub use config::{
    ConfigError, EvaluationConfig, ExplainConfig, FeatureConfig, InputConfig, LabelConfig, ResolvedInputs, RunConfig,
    SelectionConfig,
};
pub use manifest::{stage_seed, RunManifest, StageRecord, MANIFEST_VERSION};
pub use report::{build_report, Report, REPORT_VERSION};
pub use stages::{
    compare_aucs, detect_tree, dimension_columns, explain_model, ComparisonRow, Run, SavedModel, Stage, StatsFile, OUTPUT_VERSION,
};
pub use synth::{synth_corpus, PlantedDev, SynthError, SynthParams, SynthSummary};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("missing output of an earlier stage: {0}")]
    MissingStageOutput(PathBuf),
}

impl PipelineError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Runs every stage in order into `out` (or the configured directory).
pub fn run_pipeline(cfg: &RunConfig, out: Option<&Path>) -> Result<RunManifest, PipelineError> {
    let mut run = Run::create(cfg, out)?;
    for stage in Stage::ALL {
        if stage == Stage::Explain && !cfg.explain.enabled {
            continue;
        }
        run.execute(stage)?;
    }
    Ok(run.into_manifest())
}
