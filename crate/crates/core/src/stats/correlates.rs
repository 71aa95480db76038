//! The per-feature correlate study: one ANOVA + Tukey HSD row per study
//! feature, plus the per-class means table behind the summary chart.

use serde::Serialize;

use crate::classifier::Dataset;
use crate::corpus::CoarseClass;

use super::anova::{one_way_anova, AnovaResult, GroupedSamples};
use super::tukey::{tukey_hsd, TukeyResult};
use super::StatsError;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeatureAnalysis {
    Ok {
        anova: AnovaResult,
        tukey: TukeyResult,
    },
    /// The feature had no usable variance; other rows are unaffected.
    DegenerateVariance,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelateRow {
    pub feature: String,
    #[serde(flatten)]
    pub analysis: FeatureAnalysis,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMeansRow {
    pub feature: String,
    /// Mean per class in canonical order (OAG, CAG, NAG).
    pub means: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelateReport {
    pub rows: Vec<CorrelateRow>,
    pub class_means: Vec<ClassMeansRow>,
}

/// Run the correlate study over the named features of a dataset.
///
/// Requires each class to contribute at least 2 samples; a feature
/// missing from the registry aborts, while a degenerate-variance
/// feature only flags its own row.
pub fn correlate_report(ds: &Dataset, study_features: &[&str]) -> Result<CorrelateReport, StatsError> {
    let counts = ds.class_counts();
    for (class, &count) in CoarseClass::ALL.iter().zip(&counts) {
        if count < 2 {
            return Err(StatsError::ClassTooSmall {
                class: class.as_str().to_string(),
                count,
            });
        }
    }

    let mut rows = Vec::with_capacity(study_features.len());
    let mut class_means = Vec::with_capacity(study_features.len());
    for &feature in study_features {
        let column = ds
            .registry
            .index_of(feature)
            .ok_or_else(|| StatsError::MissingFeature(feature.to_string()))?;
        let grouped = GroupedSamples {
            feature_name: feature.to_string(),
            groups: ds.column_by_class(column),
        };
        class_means.push(ClassMeansRow {
            feature: feature.to_string(),
            means: grouped
                .groups
                .iter()
                .map(|(_, v)| v.iter().sum::<f64>() / v.len().max(1) as f64)
                .collect(),
        });
        let analysis = match one_way_anova(&grouped) {
            Ok(anova) => {
                let tukey = tukey_hsd(&grouped)?;
                FeatureAnalysis::Ok { anova, tukey }
            }
            Err(StatsError::DegenerateVariance(_)) => FeatureAnalysis::DegenerateVariance,
            Err(e) => return Err(e),
        };
        rows.push(CorrelateRow {
            feature: feature.to_string(),
            analysis,
        });
    }
    Ok(CorrelateReport { rows, class_means })
}

impl CorrelateReport {
    /// CSV rendition: one row per feature with the ANOVA summary and the
    /// per-pair Tukey columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "feature,status,f_statistic,df_between,df_within,p_value,p_underflow",
        );
        let pair_names = [("OAG", "CAG"), ("OAG", "NAG"), ("CAG", "NAG")];
        for (a, b) in pair_names {
            out.push_str(&format!(",q_{a}_{b},sig05_{a}_{b},sig01_{a}_{b}"));
        }
        out.push('\n');
        for row in &self.rows {
            match &row.analysis {
                FeatureAnalysis::Ok { anova, tukey } => {
                    out.push_str(&format!(
                        "{},ok,{},{},{},{},{}",
                        row.feature,
                        anova.f_statistic,
                        anova.df_between,
                        anova.df_within,
                        anova.p_value,
                        anova.p_underflow
                    ));
                    for pair in &tukey.pairs {
                        out.push_str(&format!(
                            ",{},{},{}",
                            pair.q_statistic, pair.significant_at_05, pair.significant_at_01
                        ));
                    }
                    out.push('\n');
                }
                FeatureAnalysis::DegenerateVariance => {
                    out.push_str(&format!("{},degenerate_variance,,,,,", row.feature));
                    out.push_str(&",,,".repeat(3));
                    out.push('\n');
                }
            }
        }
        out
    }

    /// CSV of per-class means (the data behind the mean-comparison chart).
    pub fn class_means_csv(&self) -> String {
        let mut out = String::from("feature,OAG,CAG,NAG\n");
        for row in &self.class_means {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.feature, row.means[0], row.means[1], row.means[2]
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
