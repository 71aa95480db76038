//! Corpus manifest: a CSV mapping audio files to their TextGrid
//! annotations and a language tag.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Hi,
    En,
}

impl Language {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hi" => Some(Language::Hi),
            "en" => Some(Language::En),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Language::Hi => "hi",
            Language::En => "en",
        }
    }
}

/// Which languages a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LanguageFilter {
    Only(Language),
    #[default]
    All,
}

impl LanguageFilter {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Some(LanguageFilter::All),
            other => Language::parse(other).map(LanguageFilter::Only),
        }
    }

    pub fn accepts(&self, language: Language) -> bool {
        match self {
            LanguageFilter::All => true,
            LanguageFilter::Only(l) => *l == language,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub audio: PathBuf,
    pub textgrid: PathBuf,
    pub language: Language,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest read error: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest record {record}: {message}")]
    Record { record: usize, message: String },
}

/// Parse a manifest with header `audio,textgrid,language`.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let want = ["audio", "textgrid", "language"];
    let got: Vec<&str> = headers.iter().collect();
    if got != want {
        return Err(ManifestError::Record {
            record: 0,
            message: format!("expected header {want:?}, found {got:?}"),
        });
    }
    let mut entries = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        if row.len() != 3 {
            return Err(ManifestError::Record {
                record: i + 1,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        let language = Language::parse(&row[2]).ok_or_else(|| ManifestError::Record {
            record: i + 1,
            message: format!("unknown language tag {:?} (expected \"hi\" or \"en\")", &row[2]),
        })?;
        entries.push(ManifestEntry {
            audio: PathBuf::from(&row[0]),
            textgrid: PathBuf::from(&row[1]),
            language,
        });
    }
    Ok(entries)
}
