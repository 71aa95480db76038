//! The labeled feature matrix consumed by training, statistics, and
//! ablation.

use crate::corpus::{CoarseClass, Language};
use crate::dsp::{FeatureGroup, FeatureRegistry};

use super::ClassifierError;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub registry: FeatureRegistry,
    /// Row-major feature matrix; every row is registry-aligned.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<CoarseClass>,
    pub segment_ids: Vec<String>,
    pub languages: Vec<Language>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.x.len()
    }

    pub fn n_features(&self) -> usize {
        self.registry.len()
    }

    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for c in &self.y {
            counts[c.index()] += 1;
        }
        counts
    }

    pub fn n_classes_present(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.x.len() != self.y.len() {
            return Err(ClassifierError::InvalidInput(format!(
                "{} rows but {} labels",
                self.x.len(),
                self.y.len()
            )));
        }
        if let Some(row) = self.x.iter().find(|r| r.len() != self.registry.len()) {
            return Err(ClassifierError::RegistryMismatch {
                expected: self.registry.len(),
                found: row.len(),
            });
        }
        if self.n_classes_present() < 2 {
            return Err(ClassifierError::InvalidInput(
                "dataset must contain at least 2 classes".to_string(),
            ));
        }
        Ok(())
    }

    /// Values of one feature column grouped by class, in class order.
    pub fn column_by_class(&self, column: usize) -> Vec<(CoarseClass, Vec<f64>)> {
        CoarseClass::ALL
            .iter()
            .map(|&class| {
                let values = self
                    .x
                    .iter()
                    .zip(&self.y)
                    .filter(|(_, &y)| y == class)
                    .map(|(row, _)| row[column])
                    .collect();
                (class, values)
            })
            .collect()
    }

    /// Project onto the columns of the given feature groups, preserving
    /// row order. The projected registry keeps only those entries.
    pub fn project_groups(&self, groups: &[FeatureGroup]) -> Dataset {
        let columns = self.registry.group_columns(groups);
        let entries: Vec<(String, FeatureGroup)> = columns
            .iter()
            .map(|&c| self.registry.entries()[c].clone())
            .collect();
        let registry = FeatureRegistry::from_entries(self.registry.version(), entries);
        Dataset {
            registry,
            x: self
                .x
                .iter()
                .map(|row| columns.iter().map(|&c| row[c]).collect())
                .collect(),
            y: self.y.clone(),
            segment_ids: self.segment_ids.clone(),
            languages: self.languages.clone(),
        }
    }

    /// Select a subset of rows by index.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            registry: self.registry.clone(),
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            segment_ids: indices.iter().map(|&i| self.segment_ids[i].clone()).collect(),
            languages: indices.iter().map(|&i| self.languages[i]).collect(),
        }
    }
}
