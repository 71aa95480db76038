//! Cumulative feature ablation: train and evaluate on growing
//! feature-group prefixes over one frozen split, so rows differ only in
//! the columns the classifier sees.

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{
    evaluate, fit_on_split, split, ClassifierError, Dataset, GridSpec, SplitSpec, TrainOptions,
};
use crate::corpus::CoarseClass;
use crate::dsp::FeatureGroup;

#[derive(Debug, Clone)]
pub struct AblationPlan {
    /// Row name and the group prefix it trains on, in table order.
    pub prefixes: Vec<(String, Vec<FeatureGroup>)>,
    pub split: SplitSpec,
    pub grid: GridSpec,
    pub options: TrainOptions,
}

impl AblationPlan {
    /// The eight cumulative rows in the canonical ablation order.
    pub fn standard(split: SplitSpec, grid: GridSpec, options: TrainOptions) -> Self {
        let mut prefixes = Vec::new();
        for k in 1..=FeatureGroup::ABLATION_ORDER.len() {
            let groups = FeatureGroup::ABLATION_ORDER[..k].to_vec();
            let name = if k == 1 {
                groups[0].as_str().to_string()
            } else {
                format!("+{}", groups[k - 1].as_str())
            };
            prefixes.push((name, groups));
        }
        AblationPlan {
            prefixes,
            split,
            grid,
            options,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.prefixes.is_empty() {
            return Err(ClassifierError::InvalidInput("empty ablation plan".to_string()));
        }
        for window in self.prefixes.windows(2) {
            let (a, b) = (&window[0].1, &window[1].1);
            if b.len() <= a.len() || &b[..a.len()] != a.as_slice() {
                return Err(ClassifierError::InvalidInput(
                    "ablation prefixes must be strictly increasing".to_string(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub prefix: String,
    pub n_features: usize,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub kernel: String,
    pub c: f64,
    pub gamma: Option<f64>,
}

/// Run every prefix of the plan against one frozen split of `ds`.
pub fn run_ablation(ds: &Dataset, plan: &AblationPlan) -> Result<Vec<AblationRow>, ClassifierError> {
    plan.validate()?;
    ds.validate()?;
    for (_, groups) in &plan.prefixes {
        for group in groups {
            if ds.registry.group_size(*group) == 0 {
                return Err(ClassifierError::InvalidInput(format!(
                    "registry has no features in group {:?}",
                    group.as_str()
                )));
            }
        }
    }

    // one split for every row
    let indices = split(&ds.y, &plan.split)?;

    let rows: Vec<Result<AblationRow, ClassifierError>> = plan
        .prefixes
        .par_iter()
        .map(|(name, groups)| {
            let projected = ds.project_groups(groups);
            let outcome = fit_on_split(&projected, &indices, &plan.grid, &plan.options)?;
            let x_test: Vec<Vec<f64>> =
                indices.test.iter().map(|&i| projected.x[i].clone()).collect();
            let y_test: Vec<CoarseClass> = indices.test.iter().map(|&i| projected.y[i]).collect();
            let (_, report) = evaluate(&outcome.model, &x_test, &y_test)?;
            Ok(AblationRow {
                prefix: name.clone(),
                n_features: projected.n_features(),
                accuracy: report.accuracy,
                weighted_f1: report.weighted.f1,
                kernel: outcome.selected.kernel,
                c: outcome.selected.c,
                gamma: outcome.selected.gamma,
            })
        })
        .collect();
    rows.into_iter().collect()
}

/// CSV rendition matching the ablation table layout.
pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("prefix,n_features,accuracy,weighted_f1,kernel,c,gamma\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.prefix,
            row.n_features,
            row.accuracy,
            row.weighted_f1,
            row.kernel,
            row.c,
            row.gamma.map_or(String::new(), |g| g.to_string())
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{GammaSpec, KernelKind};
    use crate::corpus::Language;
    use crate::dsp::FeatureRegistry;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A full-registry-shaped dataset where only the SHIMMER columns
    /// carry class signal; everything else is noise.
    pub(crate) fn shimmer_only_signal(n_per_class: usize, seed: u64) -> Dataset {
        let registry = FeatureRegistry::full();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shimmer_cols = registry.group_columns(&[FeatureGroup::Shimmer]);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (ci, class) in CoarseClass::ALL.iter().enumerate() {
            for _ in 0..n_per_class {
                let mut row: Vec<f64> = (0..registry.len())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                for &c in &shimmer_cols {
                    row[c] = 8.0 * ci as f64 + rng.gen_range(-1.0..1.0);
                }
                x.push(row);
                y.push(*class);
            }
        }
        let n = x.len();
        Dataset {
            registry,
            x,
            y,
            segment_ids: (0..n).map(|i| format!("s{i}")).collect(),
            languages: vec![Language::Hi; n],
        }
    }

    fn small_grid() -> GridSpec {
        GridSpec {
            kernels: vec![KernelKind::Linear],
            c_values: vec![1.0, 10.0],
            gammas: vec![GammaSpec::INV_DIM],
        }
    }

    #[test]
    fn standard_plan_has_eight_strictly_growing_rows() {
        let plan = AblationPlan::standard(
            SplitSpec::default(),
            small_grid(),
            TrainOptions::default(),
        );
        assert_eq!(plan.prefixes.len(), 8);
        plan.validate().unwrap();
        assert_eq!(plan.prefixes[0].0, "shimmer");
        assert_eq!(plan.prefixes[1].0, "+f0");
        assert_eq!(plan.prefixes[7].0, "+extended");
    }

    #[test]
    fn row_counts_equal_group_prefix_sums() {
        let ds = shimmer_only_signal(30, 5);
        let plan = AblationPlan::standard(
            SplitSpec::default(),
            small_grid(),
            TrainOptions::default(),
        );
        let rows = run_ablation(&ds, &plan).unwrap();
        assert_eq!(rows.len(), 8);
        let expected = [2usize, 12, 14, 24, 26, 28, 30, 66];
        for (row, want) in rows.iter().zip(expected) {
            assert_eq!(row.n_features, want, "{}", row.prefix);
        }
        // feature counts non-decreasing
        for pair in rows.windows(2) {
            assert!(pair[1].n_features >= pair[0].n_features);
        }
    }

    #[test]
    fn single_prefix_plan_equals_direct_run() {
        let ds = shimmer_only_signal(30, 6);
        let single = AblationPlan {
            prefixes: vec![("shimmer".to_string(), vec![FeatureGroup::Shimmer])],
            split: SplitSpec::default(),
            grid: small_grid(),
            options: TrainOptions::default(),
        };
        let rows = run_ablation(&ds, &single).unwrap();

        let projected = ds.project_groups(&[FeatureGroup::Shimmer]);
        let direct = crate::classifier::train_and_evaluate(
            &projected,
            &SplitSpec::default(),
            &small_grid(),
            &TrainOptions::default(),
        )
        .unwrap();
        assert_eq!(rows[0].accuracy, direct.report.accuracy);
        assert_eq!(rows[0].weighted_f1, direct.report.weighted.f1);
        assert_eq!(rows[0].c, direct.selected.c);
    }

    #[test]
    fn identical_runs_produce_identical_tables() {
        let ds = shimmer_only_signal(25, 7);
        let plan = AblationPlan::standard(
            SplitSpec::default(),
            small_grid(),
            TrainOptions::default(),
        );
        let a = ablation_csv(&run_ablation(&ds, &plan).unwrap());
        let b = ablation_csv(&run_ablation(&ds, &plan).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn non_increasing_prefixes_rejected() {
        let plan = AblationPlan {
            prefixes: vec![
                ("a".into(), vec![FeatureGroup::Shimmer, FeatureGroup::F0]),
                ("b".into(), vec![FeatureGroup::Shimmer]),
            ],
            split: SplitSpec::default(),
            grid: small_grid(),
            options: TrainOptions::default(),
        };
        assert!(plan.validate().is_err());
    }
}
