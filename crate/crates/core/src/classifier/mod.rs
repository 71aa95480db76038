//! One-vs-one multiclass SVM with SMO training, grid search, and
//! evaluation reports.

mod dataset;
mod grid;
mod kernel;
mod metrics;
mod model;
mod scale;
mod smo;
mod split;

pub use dataset::Dataset;
pub use grid::{
    fit_on_split, grid_search, train_and_evaluate, train_multiclass, CandidateScore,
    GammaSpec, GridSearchOutcome, GridSpec, KernelKind, PipelineOutcome, SelectedParams,
    TrainOptions, CLASS_PAIRS,
};
pub use kernel::Kernel;
pub use metrics::{
    evaluate, report_from_confusion, Averages, ClassMetrics, ClassificationReport,
    ConfusionMatrix,
};
pub use model::{ModelParams, PairModel, TrainedModel, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub use scale::Scaler;
pub use smo::{dual_objective, kkt_violation, train_pair_smo, PairSolution, SmoParams};
pub use split::{split, SplitIndices, SplitSpec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("feature vector length {found} does not match model registry length {expected}")]
    RegistryMismatch { expected: usize, found: usize },
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("model file format error: {0}")]
    ModelFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}
