//! Feature standardization fit on the training split only.

use serde::{Deserialize, Serialize};

/// Per-feature z-score parameters. Constant features (zero variance on
/// the training split) are marked and map to 0 everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    /// Population standard deviations; 0.0 marks a constant feature.
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(x_train: &[Vec<f64>]) -> Scaler {
        assert!(!x_train.is_empty(), "cannot fit a scaler on an empty split");
        let d = x_train[0].len();
        let n = x_train.len() as f64;
        let mut means = vec![0.0; d];
        for row in x_train {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; d];
        for row in x_train {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s < 1e-12 {
                *s = 0.0;
            }
        }
        Scaler { means, stds }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|row| self.transform_row(row)).collect()
    }

    pub fn constant_features(&self) -> Vec<usize> {
        self.stds
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}
