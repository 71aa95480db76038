//! The correlate analysis: one-way ANOVA and Tukey HSD pairwise tests
//! per feature across the three classes.

mod anova;
mod correlates;
pub mod special;
mod tukey;

pub use anova::{one_way_anova, AnovaResult, GroupedSamples};
pub use correlates::{
    correlate_report, ClassMeansRow, CorrelateReport, CorrelateRow, FeatureAnalysis,
};
pub use tukey::{
    studentized_range_cdf, studentized_range_quantile, tukey_hsd, TukeyPair, TukeyResult,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("feature {0:?} has no variance to analyze")]
    DegenerateVariance(String),
    #[error("feature {0:?} not present in the matrix")]
    MissingFeature(String),
    #[error("class {class} has only {count} samples; need at least 2")]
    ClassTooSmall { class: String, count: usize },
}
