//! Confusion matrix and classification report.
//!
//! Zero-denominator metrics are defined as 0.0; weighted averages use
//! the true-class counts as weights, which makes weighted recall equal
//! accuracy by construction.

use serde::{Deserialize, Serialize};

use crate::corpus::CoarseClass;

use super::model::TrainedModel;
use super::ClassifierError;

/// Counts indexed `[true class][predicted class]` in canonical class
/// order (OAG, CAG, NAG).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn zero() -> Self {
        ConfusionMatrix { counts: [[0; 3]; 3] }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (CoarseClass, CoarseClass)>) -> Self {
        let mut cm = Self::zero();
        for (truth, predicted) in pairs {
            cm.counts[truth.index()][predicted.index()] += 1;
        }
        cm
    }

    pub fn from_rows(rows: [[u64; 3]; 3]) -> Self {
        ConfusionMatrix { counts: rows }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, class: CoarseClass) -> u64 {
        self.counts[class.index()].iter().sum()
    }

    pub fn column_sum(&self, class: CoarseClass) -> u64 {
        self.counts.iter().map(|row| row[class.index()]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: CoarseClass,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true instances of this class.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub weighted: Averages,
    pub macro_avg: Averages,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Derive every report metric from confusion counts alone.
pub fn report_from_confusion(cm: &ConfusionMatrix) -> ClassificationReport {
    let total = cm.total();
    let mut per_class = Vec::with_capacity(3);
    for class in CoarseClass::ALL {
        let diag = cm.counts[class.index()][class.index()];
        let precision = ratio(diag, cm.column_sum(class));
        let recall = ratio(diag, cm.row_sum(class));
        per_class.push(ClassMetrics {
            class,
            precision,
            recall,
            f1: f1(precision, recall),
            support: cm.row_sum(class),
        });
    }
    let accuracy = ratio(cm.trace(), total);
    let weight = |f: &dyn Fn(&ClassMetrics) -> f64| -> f64 {
        if total == 0 {
            return 0.0;
        }
        per_class
            .iter()
            .map(|m| f(m) * m.support as f64)
            .sum::<f64>()
            / total as f64
    };
    let weighted = Averages {
        precision: weight(&|m| m.precision),
        recall: weight(&|m| m.recall),
        f1: weight(&|m| m.f1),
    };
    let macro_avg = Averages {
        precision: per_class.iter().map(|m| m.precision).sum::<f64>() / 3.0,
        recall: per_class.iter().map(|m| m.recall).sum::<f64>() / 3.0,
        f1: per_class.iter().map(|m| m.f1).sum::<f64>() / 3.0,
    };
    ClassificationReport {
        per_class,
        accuracy,
        weighted,
        macro_avg,
    }
}

/// Run the model over a labeled test set.
pub fn evaluate(
    model: &TrainedModel,
    x_test: &[Vec<f64>],
    y_test: &[CoarseClass],
) -> Result<(ConfusionMatrix, ClassificationReport), ClassifierError> {
    if x_test.is_empty() || x_test.len() != y_test.len() {
        return Err(ClassifierError::InvalidInput(
            "empty or mismatched test arrays".to_string(),
        ));
    }
    let mut cm = ConfusionMatrix::zero();
    for (row, &truth) in x_test.iter().zip(y_test) {
        let predicted = model.predict(row)?;
        cm.counts[truth.index()][predicted.index()] += 1;
    }
    let report = report_from_confusion(&cm);
    Ok((cm, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round2(x: f64) -> f64 {
        (x * 100.0).round() / 100.0
    }

    #[test]
    fn perfect_diagonal_is_all_ones() {
        let cm = ConfusionMatrix::from_rows([[10, 0, 0], [0, 5, 0], [0, 0, 20]]);
        let r = report_from_confusion(&cm);
        assert_eq!(r.accuracy, 1.0);
        for m in &r.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.weighted.f1, 1.0);
    }

    #[test]
    fn weighted_recall_equals_accuracy() {
        let cm = ConfusionMatrix::from_rows([[8, 3, 1], [2, 5, 4], [0, 7, 30]]);
        let r = report_from_confusion(&cm);
        assert!((r.weighted.recall - r.accuracy).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_metrics_are_zero() {
        // nothing predicted CAG and no true CAG rows
        let cm = ConfusionMatrix::from_rows([[5, 0, 1], [0, 0, 0], [2, 0, 9]]);
        let r = report_from_confusion(&cm);
        let cag = &r.per_class[1];
        assert_eq!((cag.precision, cag.recall, cag.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn published_three_class_fixture_hindi() {
        let cm = ConfusionMatrix::from_rows([[67, 0, 155], [5, 0, 30], [22, 0, 517]]);
        assert_eq!(cm.total(), 796);
        let r = report_from_confusion(&cm);
        assert_eq!((r.accuracy * 10000.0).round() / 10000.0, 0.7337);
        let oag = &r.per_class[0];
        assert_eq!(
            (round2(oag.precision), round2(oag.recall), round2(oag.f1)),
            (0.71, 0.30, 0.42)
        );
        let cag = &r.per_class[1];
        assert_eq!((cag.precision, cag.recall, cag.f1), (0.0, 0.0, 0.0));
        let nag = &r.per_class[2];
        assert_eq!(
            (round2(nag.precision), round2(nag.recall), round2(nag.f1)),
            (0.74, 0.96, 0.83)
        );
        assert_eq!(round2(r.weighted.precision), 0.70);
        assert_eq!(round2(r.weighted.recall), 0.73);
        assert_eq!(round2(r.weighted.f1), 0.68);
    }

    #[test]
    fn published_three_class_fixture_english() {
        let cm = ConfusionMatrix::from_rows([[252, 0, 123], [15, 0, 43], [121, 1, 345]]);
        assert_eq!(cm.total(), 900);
        let r = report_from_confusion(&cm);
        assert_eq!((r.accuracy * 10000.0).round() / 10000.0, 0.6633);
        let oag = &r.per_class[0];
        assert_eq!(
            (round2(oag.precision), round2(oag.recall), round2(oag.f1)),
            (0.65, 0.67, 0.66)
        );
        let nag = &r.per_class[2];
        assert_eq!(
            (round2(nag.precision), round2(nag.recall), round2(nag.f1)),
            (0.68, 0.74, 0.71)
        );
        let cag = &r.per_class[1];
        assert_eq!((cag.precision, cag.recall, cag.f1), (0.0, 0.0, 0.0));
        assert_eq!(round2(r.weighted.precision), 0.62);
        assert_eq!(round2(r.weighted.f1), 0.64);
    }

    #[test]
    fn row_sums_are_class_supports() {
        let cm = ConfusionMatrix::from_pairs([
            (CoarseClass::Oag, CoarseClass::Oag),
            (CoarseClass::Oag, CoarseClass::Nag),
            (CoarseClass::Nag, CoarseClass::Nag),
        ]);
        assert_eq!(cm.row_sum(CoarseClass::Oag), 2);
        assert_eq!(cm.row_sum(CoarseClass::Cag), 0);
        assert_eq!(cm.row_sum(CoarseClass::Nag), 1);
        assert_eq!(cm.total(), 3);
    }
}
