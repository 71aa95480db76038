//! One-way analysis of variance.

use serde::Serialize;

use crate::corpus::CoarseClass;

use super::special::f_survival;
use super::StatsError;

/// Values of one feature grouped by class.
#[derive(Debug, Clone)]
pub struct GroupedSamples {
    pub feature_name: String,
    pub groups: Vec<(CoarseClass, Vec<f64>)>,
}

impl GroupedSamples {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.groups.len() < 2 {
            return Err(StatsError::InvalidInput(format!(
                "{}: need at least 2 groups, found {}",
                self.feature_name,
                self.groups.len()
            )));
        }
        for (class, values) in &self.groups {
            if values.len() < 2 {
                return Err(StatsError::InvalidInput(format!(
                    "{}: class {} has {} samples, need at least 2",
                    self.feature_name,
                    class,
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::InvalidInput(format!(
                    "{}: class {} contains non-finite values",
                    self.feature_name, class
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: usize,
    /// Survival probability of F; values below 1e-300 are reported as
    /// 0.0 with `p_underflow` set.
    pub p_value: f64,
    pub p_underflow: bool,
    pub group_means: Vec<(CoarseClass, f64)>,
}

/// Sum-of-squares decomposition shared by the ANOVA and Tukey stages.
pub(crate) struct Decomposition {
    pub means: Vec<(CoarseClass, f64)>,
    pub sizes: Vec<usize>,
    pub ss_between: f64,
    pub ss_within: f64,
    pub df_between: usize,
    pub df_within: usize,
}

impl Decomposition {
    pub fn mean_square_within(&self) -> f64 {
        self.ss_within / self.df_within as f64
    }
}

pub(crate) fn decompose(g: &GroupedSamples) -> Result<Decomposition, StatsError> {
    g.validate()?;
    let n_total: usize = g.groups.iter().map(|(_, v)| v.len()).sum();
    let k = g.groups.len();

    let grand_mean: f64 =
        g.groups.iter().flat_map(|(_, v)| v).sum::<f64>() / n_total as f64;
    let mut means = Vec::with_capacity(k);
    let mut sizes = Vec::with_capacity(k);
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    let mut max_abs: f64 = 0.0;
    for (class, values) in &g.groups {
        let m = values.iter().sum::<f64>() / values.len() as f64;
        means.push((*class, m));
        sizes.push(values.len());
        ss_between += values.len() as f64 * (m - grand_mean) * (m - grand_mean);
        ss_within += values.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        max_abs = values.iter().fold(max_abs, |acc, v| acc.max(v.abs()));
    }

    // all values effectively identical: within-variance is pure rounding
    let degenerate_floor = (1e-12 * (max_abs + 1.0)).powi(2) * n_total as f64;
    if ss_within <= degenerate_floor && ss_between <= degenerate_floor {
        return Err(StatsError::DegenerateVariance(g.feature_name.clone()));
    }
    if ss_within <= degenerate_floor {
        // groups are constants with distinct values; F is unbounded
        return Err(StatsError::DegenerateVariance(g.feature_name.clone()));
    }

    Ok(Decomposition {
        means,
        sizes,
        ss_between,
        ss_within,
        df_between: k - 1,
        df_within: n_total - k,
    })
}

/// Classical one-way ANOVA: `F = (SSB/dfB) / (SSW/dfW)`, with the
/// p-value from the F survival function via the regularized incomplete
/// beta function.
pub fn one_way_anova(g: &GroupedSamples) -> Result<AnovaResult, StatsError> {
    let d = decompose(g)?;
    let f = (d.ss_between / d.df_between as f64) / d.mean_square_within();
    let p = f_survival(f, d.df_between as f64, d.df_within as f64);
    let underflow = p < 1e-300 && p >= 0.0;
    Ok(AnovaResult {
        f_statistic: f,
        df_between: d.df_between,
        df_within: d.df_within,
        p_value: if underflow { 0.0 } else { p },
        p_underflow: underflow,
        group_means: d.means,
    })
}
