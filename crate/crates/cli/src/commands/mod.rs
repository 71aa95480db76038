//! Subcommand implementations sharing one execution context.

pub mod ablate;
pub mod evaluate;
pub mod extract;
pub mod report;
pub mod stats;
pub mod train;
pub mod validate;

use std::path::{Path, PathBuf};

use aggrospeech::classifier::ClassifierError;
use aggrospeech::corpus::LanguageFilter;
use aggrospeech::stats::StatsError;
use aggrospeech::store::{FeatureStore, StoreError};

use crate::config::PipelineConfig;

/// Exit codes: 0 success, 1 usage/config, 2 data error, 3 numeric failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ClassifierError> for CliError {
    fn from(e: ClassifierError) -> Self {
        match e {
            ClassifierError::EmptyGrid => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::DegenerateVariance(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Resolved configuration plus the flag overrides every command shares.
pub struct Context {
    pub config: PipelineConfig,
    pub out_dir: PathBuf,
    pub language: LanguageFilter,
    pub continue_on_error: bool,
}

impl Context {
    pub fn store_dir(&self, explicit: &Option<PathBuf>) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.out_dir.clone())
    }

    pub fn load_store(&self, explicit: &Option<PathBuf>) -> Result<FeatureStore, CliError> {
        let dir = self.store_dir(explicit);
        FeatureStore::read_dir(&dir).map_err(|e| {
            CliError::Data(format!("cannot load feature store from {}: {e}", dir.display()))
        })
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir)?;
        std::fs::write(self.out_dir.join(name), text)?;
        Ok(())
    }
}

pub fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
