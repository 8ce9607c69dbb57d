//! Statistical comparison, Scott-Knott ESD ranking and SHAP attributions.

pub mod importance;
pub mod shap;
pub mod skesd;
pub mod stats;

pub use importance::{dimension_importance, DimensionImportance};
pub use shap::{explain, tree_shap, OutputSpace, ShapMatrix};
pub use skesd::{scott_knott_esd, RankEntry, RankTable, SkEsdConfig};
pub use stats::{
    cliffs_delta, mann_whitney_p, mean_normalized_improvement, normalized_auc_improvement, wilcoxon_signed_rank,
    EffectSize, Magnitude,
};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("paired samples differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("baseline AUC is 1; no headroom to normalize by")]
    BaselineAtCeiling,
    #[error("model expects {expected} features, row has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model has no trees")]
    NotTreeModel,
    #[error("dimension map is not a partition: {0}")]
    PartitionError(String),
}
