//! The feature store: per-segment feature vectors persisted as CSV with
//! a registry manifest and a sidecar of degeneracy flags.
//!
//! Store layout (one directory):
//!   features.csv   segment_id,language,class,<group.name>...
//!   registry.txt   versioned feature registry manifest
//!   flags.csv      segment_id,feature  (one row per imputed functional)

use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::classifier::Dataset;
use crate::corpus::{CoarseClass, Language, LanguageFilter};
use crate::dsp::{FeatureRegistry, FeatureVector};

pub const FEATURES_FILE: &str = "features.csv";
pub const REGISTRY_FILE: &str = "registry.txt";
pub const FLAGS_FILE: &str = "flags.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub segment_id: String,
    pub language: Language,
    pub class: CoarseClass,
    pub values: Vec<f64>,
    pub degenerate: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FeatureStore {
    pub registry: FeatureRegistry,
    pub records: Vec<FeatureRecord>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("store CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("store format error: {0}")]
    Format(String),
    #[error(transparent)]
    Registry(#[from] crate::dsp::RegistryError),
}

impl FeatureStore {
    pub fn new(registry: FeatureRegistry) -> Self {
        FeatureStore {
            registry,
            records: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        segment_id: String,
        language: Language,
        class: CoarseClass,
        vector: FeatureVector,
    ) {
        debug_assert_eq!(vector.values.len(), self.registry.len());
        self.records.push(FeatureRecord {
            segment_id,
            language,
            class,
            values: vector.values,
            degenerate: vector.degenerate,
        });
    }

    /// Write the three store files into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), StoreError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(REGISTRY_FILE), self.registry.manifest_text())?;

        let mut features = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "segment_id".to_string(),
            "language".to_string(),
            "class".to_string(),
        ];
        header.extend(self.registry.headers());
        features.write_record(&header)?;
        for record in &self.records {
            let mut row = vec![
                record.segment_id.clone(),
                record.language.as_str().to_string(),
                record.class.as_str().to_string(),
            ];
            row.extend(record.values.iter().map(|v| v.to_string()));
            features.write_record(&row)?;
        }
        let bytes = features
            .into_inner()
            .map_err(|e| StoreError::Format(e.to_string()))?;
        std::fs::write(dir.join(FEATURES_FILE), bytes)?;

        let mut flags = Vec::new();
        writeln!(flags, "segment_id,feature")?;
        for record in &self.records {
            for feature in &record.degenerate {
                writeln!(flags, "{},{}", record.segment_id, feature)?;
            }
        }
        std::fs::write(dir.join(FLAGS_FILE), flags)?;
        Ok(())
    }

    /// Read a store directory written by [`FeatureStore::write_dir`].
    pub fn read_dir(dir: &Path) -> Result<FeatureStore, StoreError> {
        let registry_text = std::fs::read_to_string(dir.join(REGISTRY_FILE))?;
        let registry = FeatureRegistry::parse_manifest_text(&registry_text)?;

        let mut reader = csv::Reader::from_path(dir.join(FEATURES_FILE))?;
        let headers = reader.headers()?.clone();
        let expected: Vec<String> = ["segment_id", "language", "class"]
            .into_iter()
            .map(String::from)
            .chain(registry.headers())
            .collect();
        let found: Vec<&str> = headers.iter().collect();
        if found != expected.iter().map(|s| s.as_str()).collect::<Vec<_>>() {
            return Err(StoreError::Format(
                "feature CSV header does not match the registry manifest".to_string(),
            ));
        }

        let mut records = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            if row.len() != 3 + registry.len() {
                return Err(StoreError::Format(format!(
                    "record {}: expected {} fields, found {}",
                    i + 1,
                    3 + registry.len(),
                    row.len()
                )));
            }
            let language = Language::parse(&row[1]).ok_or_else(|| {
                StoreError::Format(format!("record {}: bad language {:?}", i + 1, &row[1]))
            })?;
            let class = CoarseClass::parse(&row[2])
                .map_err(|e| StoreError::Format(format!("record {}: {e}", i + 1)))?;
            let values = row
                .iter()
                .skip(3)
                .map(|v| {
                    v.parse::<f64>().map_err(|_| {
                        StoreError::Format(format!("record {}: bad number {v:?}", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>, StoreError>>()?;
            if values.iter().any(|v| !v.is_finite()) {
                return Err(StoreError::Format(format!(
                    "record {}: non-finite feature value",
                    i + 1
                )));
            }
            records.push(FeatureRecord {
                segment_id: row[0].to_string(),
                language,
                class,
                values,
                degenerate: Vec::new(),
            });
        }

        // reattach degeneracy flags when the sidecar exists
        let flags_path = dir.join(FLAGS_FILE);
        if flags_path.exists() {
            let mut by_id: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
            for (i, r) in records.iter().enumerate() {
                by_id.insert(r.segment_id.as_str(), i);
            }
            let text = std::fs::read_to_string(flags_path)?;
            let mut updates: Vec<(usize, String)> = Vec::new();
            for line in text.lines().skip(1) {
                if let Some((id, feature)) = line.split_once(',') {
                    if let Some(&idx) = by_id.get(id) {
                        updates.push((idx, feature.to_string()));
                    }
                }
            }
            for (idx, feature) in updates {
                records[idx].degenerate.push(feature);
            }
        }

        Ok(FeatureStore { registry, records })
    }

    /// Materialize a dataset, optionally filtered by language.
    pub fn to_dataset(&self, filter: LanguageFilter) -> Dataset {
        let selected: Vec<&FeatureRecord> = self
            .records
            .iter()
            .filter(|r| filter.accepts(r.language))
            .collect();
        Dataset {
            registry: self.registry.clone(),
            x: selected.iter().map(|r| r.values.clone()).collect(),
            y: selected.iter().map(|r| r.class).collect(),
            segment_ids: selected.iter().map(|r| r.segment_id.clone()).collect(),
            languages: selected.iter().map(|r| r.language).collect(),
        }
    }
}
