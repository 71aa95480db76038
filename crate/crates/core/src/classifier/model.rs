//! One-vs-one multiclass model: three pairwise sub-models over the
//! fixed class order, a train-split scaler, and the registry manifest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::CoarseClass;
use crate::dsp::FeatureRegistry;

use super::kernel::Kernel;
use super::scale::Scaler;
use super::smo::PairSolution;
use super::ClassifierError;

pub const MODEL_MAGIC: &str = "aggrospeech-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairModel {
    /// (positive class, negative class) in canonical order.
    pub classes: (CoarseClass, CoarseClass),
    pub kernel: Kernel,
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

impl PairModel {
    pub fn from_solution(classes: (CoarseClass, CoarseClass), sol: &PairSolution) -> Self {
        PairModel {
            classes,
            kernel: sol.kernel,
            support_vectors: sol.support_vectors.clone(),
            coefficients: sol.coefficients.clone(),
            bias: sol.bias,
            converged: sol.converged,
        }
    }

    /// Signed decision value; positive favors `classes.0`.
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// Hyperparameters the model was trained with, carried for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kernel: String,
    pub c: f64,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    magic: String,
    format_version: u32,
    /// Registry manifest embedded verbatim.
    pub registry_manifest: String,
    pub params: ModelParams,
    pub scaler: Scaler,
    /// Pairwise sub-models in canonical pair order:
    /// (OAG,CAG), (OAG,NAG), (CAG,NAG).
    pub pairs: Vec<PairModel>,
    pub classes: Vec<CoarseClass>,
}

impl TrainedModel {
    pub fn new(
        registry: &FeatureRegistry,
        scaler: Scaler,
        pairs: Vec<PairModel>,
        params: ModelParams,
    ) -> Self {
        TrainedModel {
            magic: MODEL_MAGIC.to_string(),
            format_version: MODEL_FORMAT_VERSION,
            registry_manifest: registry.manifest_text(),
            params,
            scaler,
            pairs,
            classes: CoarseClass::ALL.to_vec(),
        }
    }

    pub fn registry(&self) -> Result<FeatureRegistry, ClassifierError> {
        FeatureRegistry::parse_manifest_text(&self.registry_manifest)
            .map_err(|e| ClassifierError::InvalidInput(e.to_string()))
    }

    pub fn n_features(&self) -> usize {
        self.scaler.means.len()
    }

    /// Classify one raw (unstandardized) feature vector.
    ///
    /// Majority vote over the pairwise decisions; ties break by the
    /// largest summed signed decision value, then by class order.
    pub fn predict(&self, x: &[f64]) -> Result<CoarseClass, ClassifierError> {
        if x.len() != self.n_features() {
            return Err(ClassifierError::RegistryMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        let scaled = self.scaler.transform_row(x);
        let mut votes = [0usize; 3];
        let mut scores = [0.0f64; 3];
        for pair in &self.pairs {
            let d = pair.decision(&scaled);
            let (a, b) = pair.classes;
            if d >= 0.0 {
                votes[a.index()] += 1;
            } else {
                votes[b.index()] += 1;
            }
            scores[a.index()] += d;
            scores[b.index()] -= d;
        }
        let best = CoarseClass::ALL
            .iter()
            .max_by(|&&a, &&b| {
                votes[a.index()]
                    .cmp(&votes[b.index()])
                    .then(scores[a.index()].total_cmp(&scores[b.index()]))
                    // class order as the final tie-break: earlier wins
                    .then(b.index().cmp(&a.index()))
            })
            .copied()
            .unwrap();
        Ok(best)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let model: TrainedModel = serde_json::from_str(text)
            .map_err(|e| ClassifierError::ModelFormat(e.to_string()))?;
        if model.magic != MODEL_MAGIC {
            return Err(ClassifierError::ModelFormat(format!(
                "bad magic {:?}",
                model.magic
            )));
        }
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(ClassifierError::ModelFormat(format!(
                "unsupported format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| ClassifierError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClassifierError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stub_pair(classes: (CoarseClass, CoarseClass), bias: f64) -> PairModel {
        // decision(x) = x[0] + bias
        PairModel {
            classes,
            kernel: Kernel::Linear,
            support_vectors: vec![vec![1.0, 0.0]],
            coefficients: vec![1.0],
            bias,
            converged: true,
        }
    }

    fn identity_scaler(d: usize) -> Scaler {
        Scaler {
            means: vec![0.0; d],
            stds: vec![1.0; d],
        }
    }

    fn model_with_biases(b: [f64; 3]) -> TrainedModel {
        TrainedModel::new(
            &FeatureRegistry::from_entries(1, vec![
                ("a".into(), crate::dsp::FeatureGroup::Shimmer),
                ("b".into(), crate::dsp::FeatureGroup::Shimmer),
            ]),
            identity_scaler(2),
            vec![
                stub_pair((CoarseClass::Oag, CoarseClass::Cag), b[0]),
                stub_pair((CoarseClass::Oag, CoarseClass::Nag), b[1]),
                stub_pair((CoarseClass::Cag, CoarseClass::Nag), b[2]),
            ],
            ModelParams {
                kernel: "linear".to_string(),
                c: 1.0,
                gamma: None,
            },
        )
    }

    #[test]
    fn unanimous_vote_wins() {
        // all three decisions negative at x=0 with bias -1:
        // (OAG,CAG) -> CAG, (OAG,NAG) -> NAG, (CAG,NAG) -> NAG
        let model = model_with_biases([-1.0, -1.0, -1.0]);
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), CoarseClass::Nag);
    }

    #[test]
    fn circular_vote_resolved_by_summed_decision_values() {
        // OAG beats CAG (+0.5), NAG beats OAG (-2.0), CAG beats NAG (+1.0):
        // one vote each; scores: OAG 0.5-2.0 = -1.5? no:
        //   OAG: +0.5 + (-2.0) = -1.5
        //   CAG: -0.5 + 1.0 = 0.5
        //   NAG: +2.0 - 1.0 = 1.0   -> NAG wins the tie
        let model = model_with_biases([0.5, -2.0, 1.0]);
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), CoarseClass::Nag);
    }

    #[test]
    fn wrong_vector_length_is_registry_mismatch() {
        let model = model_with_biases([0.0, 0.0, 0.0]);
        assert!(matches!(
            model.predict(&[1.0]),
            Err(ClassifierError::RegistryMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut model = model_with_biases([0.1, -0.2, 0.3]);
        model.pairs[0].support_vectors = vec![vec![std::f64::consts::PI, 1.0 / 3.0]];
        model.pairs[0].coefficients = vec![0.123456789012345678];
        let text = model.to_json();
        let back = TrainedModel::from_json(&text).unwrap();
        assert_eq!(back.pairs[0].support_vectors, model.pairs[0].support_vectors);
        assert_eq!(back.pairs[0].coefficients, model.pairs[0].coefficients);
        assert_eq!(back.pairs[0].bias, model.pairs[0].bias);
        assert_eq!(back.registry_manifest, model.registry_manifest);
    }

    #[test]
    fn bad_magic_rejected() {
        let model = model_with_biases([0.0; 3]);
        let text = model.to_json().replace(MODEL_MAGIC, "something-else");
        assert!(matches!(
            TrainedModel::from_json(&text),
            Err(ClassifierError::ModelFormat(_))
        ));
    }
}
