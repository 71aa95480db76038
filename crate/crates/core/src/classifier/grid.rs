//! Hyperparameter grid search on the validation split, plus the
//! end-to-end training entry point (split, standardize, search, refit).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CoarseClass;

use super::dataset::Dataset;
use super::kernel::Kernel;
use super::metrics::{evaluate, ClassificationReport, ConfusionMatrix};
use super::model::{ModelParams, PairModel, TrainedModel};
use super::scale::Scaler;
use super::smo::{train_pair_smo, SmoParams};
use super::split::{split, SplitIndices, SplitSpec};
use super::ClassifierError;

/// Gamma entry in a grid: either a fixed value or 1/n_features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Fixed(f64),
    /// The string "1/d".
    InverseDimension(InverseDimensionTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseDimensionTag {
    #[serde(rename = "1/d")]
    OneOverD,
}

impl GammaSpec {
    pub const INV_DIM: GammaSpec = GammaSpec::InverseDimension(InverseDimensionTag::OneOverD);

    pub fn resolve(&self, n_features: usize) -> f64 {
        match self {
            GammaSpec::Fixed(g) => *g,
            GammaSpec::InverseDimension(_) => 1.0 / n_features.max(1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kernels: Vec<KernelKind>,
    pub c_values: Vec<f64>,
    /// Only consulted for RBF kernels.
    pub gammas: Vec<GammaSpec>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            kernels: vec![KernelKind::Linear, KernelKind::Rbf],
            c_values: vec![0.1, 1.0, 10.0, 100.0],
            gammas: vec![GammaSpec::INV_DIM, GammaSpec::Fixed(0.01), GammaSpec::Fixed(0.1)],
        }
    }
}

impl GridSpec {
    /// Enumerate candidates in the deterministic tie-break order:
    /// ascending C, then linear before RBF, then ascending gamma.
    pub fn candidates(&self, n_features: usize) -> Vec<(f64, Kernel)> {
        let mut c_values = self.c_values.clone();
        c_values.sort_by(|a, b| a.total_cmp(b));
        c_values.dedup();
        let mut gammas: Vec<f64> = self.gammas.iter().map(|g| g.resolve(n_features)).collect();
        gammas.sort_by(|a, b| a.total_cmp(b));
        gammas.dedup();

        let mut out = Vec::new();
        for &c in &c_values {
            if self.kernels.contains(&KernelKind::Linear) {
                out.push((c, Kernel::Linear));
            }
            if self.kernels.contains(&KernelKind::Rbf) {
                for &gamma in &gammas {
                    out.push((c, Kernel::Rbf { gamma }));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub smo_tolerance: f64,
    pub max_passes: usize,
    pub max_sweeps: usize,
    /// Per-class C weighting `C_c = C * N / (k * N_c)`; off by default.
    pub class_weight: bool,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            smo_tolerance: 1e-3,
            max_passes: 3,
            max_sweeps: 2000,
            class_weight: false,
            seed: 42,
        }
    }
}

/// The three class pairs in canonical order.
pub const CLASS_PAIRS: [(CoarseClass, CoarseClass); 3] = [
    (CoarseClass::Oag, CoarseClass::Cag),
    (CoarseClass::Oag, CoarseClass::Nag),
    (CoarseClass::Cag, CoarseClass::Nag),
];

/// Train the three one-vs-one sub-models on already-standardized data.
pub fn train_multiclass(
    x: &[Vec<f64>],
    y: &[CoarseClass],
    c: f64,
    kernel: Kernel,
    options: &TrainOptions,
    class_counts: &[usize; 3],
    seed_base: u64,
) -> Result<Vec<PairModel>, ClassifierError> {
    let params = SmoParams {
        kernel,
        c,
        tolerance: options.smo_tolerance,
        max_passes: options.max_passes,
        max_sweeps: options.max_sweeps,
    };
    let n_total: usize = class_counts.iter().sum();
    let class_c = |class: CoarseClass| -> f64 {
        if options.class_weight {
            let n_c = class_counts[class.index()].max(1);
            c * n_total as f64 / (3.0 * n_c as f64)
        } else {
            c
        }
    };

    CLASS_PAIRS
        .iter()
        .enumerate()
        .map(|(pair_idx, &(pos, neg))| {
            let mut px = Vec::new();
            let mut py = Vec::new();
            for (row, &label) in x.iter().zip(y) {
                if label == pos {
                    px.push(row.clone());
                    py.push(1.0);
                } else if label == neg {
                    px.push(row.clone());
                    py.push(-1.0);
                }
            }
            if !py.contains(&1.0) || !py.contains(&-1.0) {
                return Err(ClassifierError::InvalidInput(format!(
                    "pair ({pos}, {neg}) is missing a class in the training split"
                )));
            }
            let solution = train_pair_smo(
                &px,
                &py,
                &params,
                (class_c(pos), class_c(neg)),
                seed_base.wrapping_add(pair_idx as u64),
            )?;
            Ok(PairModel::from_solution((pos, neg), &solution))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateScore {
    pub c: f64,
    pub kernel: String,
    pub gamma: Option<f64>,
    pub validation_accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectedParams {
    pub c: f64,
    pub kernel: String,
    pub gamma: Option<f64>,
}

pub struct GridSearchOutcome {
    pub model: TrainedModel,
    pub selected: SelectedParams,
    pub validation_accuracy: f64,
    pub scores: Vec<CandidateScore>,
}

/// Score every grid point on the validation split and keep the argmax.
/// Strict improvement is required to displace the incumbent, so the
/// enumeration order (ascending C, linear first, ascending gamma) is
/// also the tie-break order. The returned model is fit on train only.
pub fn grid_search(
    registry: &crate::dsp::FeatureRegistry,
    scaler: Scaler,
    x_train: &[Vec<f64>],
    y_train: &[CoarseClass],
    x_val: &[Vec<f64>],
    y_val: &[CoarseClass],
    grid: &GridSpec,
    options: &TrainOptions,
) -> Result<GridSearchOutcome, ClassifierError> {
    let candidates = grid.candidates(x_train.first().map_or(0, |r| r.len()));
    if candidates.is_empty() {
        return Err(ClassifierError::EmptyGrid);
    }
    let mut class_counts = [0usize; 3];
    for c in y_train {
        class_counts[c.index()] += 1;
    }

    let results: Vec<Result<(Vec<PairModel>, f64), ClassifierError>> = candidates
        .par_iter()
        .enumerate()
        .map(|(idx, &(c, kernel))| {
            let pairs = train_multiclass(
                x_train,
                y_train,
                c,
                kernel,
                options,
                &class_counts,
                options.seed.wrapping_add(1000 * (idx as u64 + 1)),
            )?;
            let params = ModelParams {
                kernel: kernel.name().to_string(),
                c,
                gamma: kernel.gamma(),
            };
            let model = TrainedModel::new(registry, scaler.clone(), pairs, params);
            let correct = x_val
                .iter()
                .zip(y_val)
                .filter(|(row, &truth)| model.predict(row).ok() == Some(truth))
                .count();
            let accuracy = if y_val.is_empty() {
                0.0
            } else {
                correct as f64 / y_val.len() as f64
            };
            Ok((model.pairs, accuracy))
        })
        .collect();

    let mut best: Option<(usize, f64, Vec<PairModel>)> = None;
    let mut scores = Vec::with_capacity(candidates.len());
    for (idx, result) in results.into_iter().enumerate() {
        let (pairs, accuracy) = result?;
        let (c, kernel) = candidates[idx];
        scores.push(CandidateScore {
            c,
            kernel: kernel.name().to_string(),
            gamma: kernel.gamma(),
            validation_accuracy: accuracy,
        });
        if best.as_ref().map_or(true, |(_, a, _)| accuracy > *a) {
            best = Some((idx, accuracy, pairs));
        }
    }
    let (best_idx, validation_accuracy, pairs) = best.unwrap();
    let (c, kernel) = candidates[best_idx];
    let params = ModelParams {
        kernel: kernel.name().to_string(),
        c,
        gamma: kernel.gamma(),
    };

    Ok(GridSearchOutcome {
        model: TrainedModel::new(registry, scaler, pairs, params),
        selected: SelectedParams {
            c,
            kernel: kernel.name().to_string(),
            gamma: kernel.gamma(),
        },
        validation_accuracy,
        scores,
    })
}

/// Full training pipeline over a dataset: stratified split, train-split
/// standardization, grid search, and held-out evaluation.
pub struct PipelineOutcome {
    pub model: TrainedModel,
    pub selected: SelectedParams,
    pub validation_accuracy: f64,
    pub scores: Vec<CandidateScore>,
    pub split: SplitIndices,
    pub confusion: ConfusionMatrix,
    pub report: ClassificationReport,
}

pub fn train_and_evaluate(
    ds: &Dataset,
    split_spec: &SplitSpec,
    grid: &GridSpec,
    options: &TrainOptions,
) -> Result<PipelineOutcome, ClassifierError> {
    ds.validate()?;
    let indices = split(&ds.y, split_spec)?;
    let outcome = fit_on_split(ds, &indices, grid, options)?;

    let x_test: Vec<Vec<f64>> = indices.test.iter().map(|&i| ds.x[i].clone()).collect();
    let y_test: Vec<CoarseClass> = indices.test.iter().map(|&i| ds.y[i]).collect();
    let (confusion, report) = evaluate(&outcome.model, &x_test, &y_test)?;

    Ok(PipelineOutcome {
        model: outcome.model,
        selected: outcome.selected,
        validation_accuracy: outcome.validation_accuracy,
        scores: outcome.scores,
        split: indices,
        confusion,
        report,
    })
}

/// Fit on a precomputed split (shared by training and ablation so every
/// ablation row sees identical rows).
pub fn fit_on_split(
    ds: &Dataset,
    indices: &SplitIndices,
    grid: &GridSpec,
    options: &TrainOptions,
) -> Result<GridSearchOutcome, ClassifierError> {
    let x_train_raw: Vec<Vec<f64>> = indices.train.iter().map(|&i| ds.x[i].clone()).collect();
    let y_train: Vec<CoarseClass> = indices.train.iter().map(|&i| ds.y[i]).collect();
    if x_train_raw.is_empty() {
        return Err(ClassifierError::InvalidInput("empty training split".to_string()));
    }
    let scaler = Scaler::fit(&x_train_raw);
    let x_train = scaler.transform(&x_train_raw);
    // the model standardizes inputs itself, so validation rows stay raw
    let x_val: Vec<Vec<f64>> = indices.validate.iter().map(|&i| ds.x[i].clone()).collect();
    let y_val: Vec<CoarseClass> = indices.validate.iter().map(|&i| ds.y[i]).collect();

    // grid_search scores with model.predict, which scales internally;
    // training rows are passed pre-scaled
    grid_search(
        &ds.registry,
        scaler,
        &x_train,
        &y_train,
        &x_val,
        &y_val,
        grid,
        options,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;
    use crate::dsp::{FeatureGroup, FeatureRegistry};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Three well-separated Gaussian blobs in 4 dimensions.
    pub(crate) fn blobs(n_per_class: usize, seed: u64, spread: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = [
            [4.0, 0.0, 0.0, 1.0],
            [0.0, 4.0, 0.0, -1.0],
            [0.0, 0.0, 4.0, 0.5],
        ];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (ci, class) in CoarseClass::ALL.iter().enumerate() {
            for _ in 0..n_per_class {
                let row: Vec<f64> = centers[ci]
                    .iter()
                    .map(|c| c + rng.gen_range(-spread..spread))
                    .collect();
                x.push(row);
                y.push(*class);
            }
        }
        let entries = (0..4)
            .map(|i| (format!("blob{i}"), FeatureGroup::Shimmer))
            .collect();
        let n = x.len();
        Dataset {
            registry: FeatureRegistry::from_entries(1, entries),
            x,
            y,
            segment_ids: (0..n).map(|i| format!("s{i}")).collect(),
            languages: vec![Language::Hi; n],
        }
    }

    #[test]
    fn candidate_order_is_c_then_kernel_then_gamma() {
        let grid = GridSpec {
            kernels: vec![KernelKind::Linear, KernelKind::Rbf],
            c_values: vec![10.0, 1.0],
            gammas: vec![GammaSpec::Fixed(0.1), GammaSpec::Fixed(0.01)],
        };
        let cands = grid.candidates(4);
        let shape: Vec<(f64, &str, Option<f64>)> = cands
            .iter()
            .map(|(c, k)| (*c, k.name(), k.gamma()))
            .collect();
        assert_eq!(
            shape,
            vec![
                (1.0, "linear", None),
                (1.0, "rbf", Some(0.01)),
                (1.0, "rbf", Some(0.1)),
                (10.0, "linear", None),
                (10.0, "rbf", Some(0.01)),
                (10.0, "rbf", Some(0.1)),
            ]
        );
    }

    #[test]
    fn single_point_grid_returns_that_point() {
        let ds = blobs(20, 9, 1.0);
        let grid = GridSpec {
            kernels: vec![KernelKind::Linear],
            c_values: vec![1.0],
            gammas: vec![],
        };
        let out = train_and_evaluate(&ds, &SplitSpec::default(), &grid, &TrainOptions::default())
            .unwrap();
        assert_eq!(out.selected.kernel, "linear");
        assert_eq!(out.selected.c, 1.0);
        assert_eq!(out.scores.len(), 1);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let ds = blobs(10, 9, 1.0);
        let grid = GridSpec {
            kernels: vec![],
            c_values: vec![1.0],
            gammas: vec![],
        };
        assert!(matches!(
            train_and_evaluate(&ds, &SplitSpec::default(), &grid, &TrainOptions::default()),
            Err(ClassifierError::EmptyGrid)
        ));
    }

    #[test]
    fn separable_blobs_reach_high_accuracy() {
        let ds = blobs(60, 4, 1.0);
        let grid = GridSpec {
            kernels: vec![KernelKind::Linear, KernelKind::Rbf],
            c_values: vec![1.0, 10.0],
            gammas: vec![GammaSpec::INV_DIM],
        };
        let out = train_and_evaluate(&ds, &SplitSpec::default(), &grid, &TrainOptions::default())
            .unwrap();
        assert!(
            out.validation_accuracy >= 0.95,
            "validation accuracy {}",
            out.validation_accuracy
        );
        assert!(out.report.accuracy >= 0.95, "test accuracy {}", out.report.accuracy);
    }

    #[test]
    fn tie_breaks_prefer_smaller_c() {
        // trivially separable data: every candidate scores 1.0
        let ds = blobs(20, 2, 0.3);
        let grid = GridSpec {
            kernels: vec![KernelKind::Linear],
            c_values: vec![100.0, 0.1, 10.0],
            gammas: vec![],
        };
        let out = train_and_evaluate(&ds, &SplitSpec::default(), &grid, &TrainOptions::default())
            .unwrap();
        assert_eq!(out.selected.c, 0.1);
    }

    #[test]
    fn deterministic_across_runs() {
        let ds = blobs(30, 8, 1.2);
        let run = || {
            train_and_evaluate(
                &ds,
                &SplitSpec::default(),
                &GridSpec {
                    kernels: vec![KernelKind::Linear, KernelKind::Rbf],
                    c_values: vec![1.0, 10.0],
                    gammas: vec![GammaSpec::Fixed(0.1)],
                },
                &TrainOptions::default(),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.model.to_json(), b.model.to_json());
        assert_eq!(a.confusion, b.confusion);
    }
}
