//! Feature selection, bootstrap validation, classifiers and model evaluation.

mod auc;
pub mod bootstrap;
mod dataset;
pub mod experiment;
pub mod forest;
pub mod gbt;
pub mod grid;
pub mod knn;
pub mod model;
pub mod nb;
pub mod select;
pub mod tree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use auc::{auc, midranks};
pub use bootstrap::{bootstrap_plan, BootstrapPlan, Split, DEFAULT_REPETITIONS};
pub use dataset::Dataset;
pub use experiment::{permutation_control, run_experiment, AucTable, Learner, ModelSpec};
pub use grid::{grid_search, GridResult, GridSpec, DEFAULT_FOLDS};
pub use model::{train, Model, ModelKind, Params};
pub use select::{autospearman, DropReason, SelectionResult};

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error("training labels hold a single class")]
    SingleClassTraining,
    #[error("evaluation labels hold a single class")]
    SingleClassEval,
    #[error("bootstrap repetition {repetition} kept drawing degenerate splits")]
    DegenerateSplit { repetition: usize },
    #[error("{n} samples, at least {needed} needed")]
    TooFewSamples { n: usize, needed: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("feature sets disagree: {0}")]
    MismatchedData(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Independent random stream `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
