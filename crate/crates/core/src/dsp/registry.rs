//! The ordered feature registry. Feature vectors, the feature store, the
//! correlate report, and model files all key off this ordering; the
//! group order matches the cumulative ablation sequence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REGISTRY_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Shimmer,
    F0,
    Jitter,
    Intensity,
    SpectralFlux,
    VoicedLen,
    PeakRateCvd,
    Extended,
}

impl FeatureGroup {
    /// Ablation order: each group extends the previous prefix.
    pub const ABLATION_ORDER: [FeatureGroup; 8] = [
        FeatureGroup::Shimmer,
        FeatureGroup::F0,
        FeatureGroup::Jitter,
        FeatureGroup::Intensity,
        FeatureGroup::SpectralFlux,
        FeatureGroup::VoicedLen,
        FeatureGroup::PeakRateCvd,
        FeatureGroup::Extended,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureGroup::Shimmer => "shimmer",
            FeatureGroup::F0 => "f0",
            FeatureGroup::Jitter => "jitter",
            FeatureGroup::Intensity => "intensity",
            FeatureGroup::SpectralFlux => "spectral_flux",
            FeatureGroup::VoicedLen => "voiced_len",
            FeatureGroup::PeakRateCvd => "peak_rate_cvd",
            FeatureGroup::Extended => "extended",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "shimmer" => Some(FeatureGroup::Shimmer),
            "f0" => Some(FeatureGroup::F0),
            "jitter" => Some(FeatureGroup::Jitter),
            "intensity" => Some(FeatureGroup::Intensity),
            "spectral_flux" => Some(FeatureGroup::SpectralFlux),
            "voiced_len" => Some(FeatureGroup::VoicedLen),
            "peak_rate_cvd" => Some(FeatureGroup::PeakRateCvd),
            "extended" => Some(FeatureGroup::Extended),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    version: u32,
    entries: Vec<(String, FeatureGroup)>,
}

/// The ten distribution functionals applied to F0 and intensity.
const TEN_FUNCTIONALS: [&str; 10] = [
    "mean",
    "std",
    "p20",
    "p50",
    "p80",
    "range",
    "rise_slope_mean",
    "rise_slope_std",
    "fall_slope_mean",
    "fall_slope_std",
];

impl FeatureRegistry {
    /// The core study registry: shimmer(2) + F0(10) + jitter(2) +
    /// intensity(10) + spectral flux(2) + voiced lengths(2) + peak
    /// rate/CVd(2) = 30 features.
    pub fn core() -> Self {
        let mut entries = Vec::new();
        let mut push = |name: String, group: FeatureGroup| entries.push((name, group));

        push("shimmer_mean".into(), FeatureGroup::Shimmer);
        push("shimmer_std".into(), FeatureGroup::Shimmer);
        for f in TEN_FUNCTIONALS {
            push(format!("f0_{f}"), FeatureGroup::F0);
        }
        push("jitter_mean".into(), FeatureGroup::Jitter);
        push("jitter_std".into(), FeatureGroup::Jitter);
        for f in TEN_FUNCTIONALS {
            push(format!("intensity_{f}"), FeatureGroup::Intensity);
        }
        push("flux_mean".into(), FeatureGroup::SpectralFlux);
        push("flux_std".into(), FeatureGroup::SpectralFlux);
        push("mvd".into(), FeatureGroup::VoicedLen);
        push("mvl".into(), FeatureGroup::VoicedLen);
        push("rlp".into(), FeatureGroup::PeakRateCvd);
        push("cvd".into(), FeatureGroup::PeakRateCvd);

        FeatureRegistry {
            version: REGISTRY_VERSION,
            entries,
        }
    }

    /// Core plus mean/std of each of the 18 extended tracks: 66 features.
    pub fn full() -> Self {
        let mut registry = Self::core();
        let mut push = |name: String| registry.entries.push((name, FeatureGroup::Extended));
        for i in 1..=4 {
            push(format!("mfcc{i}_mean"));
            push(format!("mfcc{i}_std"));
        }
        for i in 1..=3 {
            for part in ["freq", "bw", "amp"] {
                push(format!("f{i}_{part}_mean"));
                push(format!("f{i}_{part}_std"));
            }
        }
        for base in ["hnr", "alpha_ratio", "hammarberg", "slope0_500", "slope500_1500"] {
            push(format!("{base}_mean"));
            push(format!("{base}_std"));
        }
        registry
    }

    /// The nine study features analyzed by the correlate report, in
    /// presentation order.
    pub fn study_features() -> [&'static str; 9] {
        [
            "shimmer_mean",
            "f0_mean",
            "jitter_mean",
            "intensity_mean",
            "rlp",
            "mvd",
            "mvl",
            "cvd",
            "flux_mean",
        ]
    }

    /// Assemble a registry from explicit entries (projection, file loads).
    pub fn from_entries(version: u32, entries: Vec<(String, FeatureGroup)>) -> Self {
        FeatureRegistry { version, entries }
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn entries(&self) -> &[(String, FeatureGroup)] {
        &self.entries
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn group_of(&self, index: usize) -> FeatureGroup {
        self.entries[index].1
    }

    /// Column headers for the feature store: `group.name`.
    pub fn headers(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(n, g)| format!("{}.{}", g.as_str(), n))
            .collect()
    }

    /// Column indices belonging to any of the given groups, in registry
    /// order.
    pub fn group_columns(&self, groups: &[FeatureGroup]) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, (_, g))| groups.contains(g))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn group_size(&self, group: FeatureGroup) -> usize {
        self.entries.iter().filter(|(_, g)| *g == group).count()
    }

    /// Versioned manifest, embedded verbatim in model files and written
    /// beside feature stores.
    pub fn manifest_text(&self) -> String {
        let mut out = format!("registry_version={}\n", self.version);
        for (name, group) in &self.entries {
            out.push_str(&format!("{} {}\n", group.as_str(), name));
        }
        out
    }

    pub fn parse_manifest_text(text: &str) -> Result<Self, RegistryError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(RegistryError::EmptyManifest)?;
        let version = header
            .strip_prefix("registry_version=")
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| RegistryError::BadHeader(header.to_string()))?;
        let mut entries = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (group, name) = line
                .split_once(' ')
                .ok_or_else(|| RegistryError::BadEntry(line.to_string()))?;
            let group = FeatureGroup::parse(group)
                .ok_or_else(|| RegistryError::BadEntry(line.to_string()))?;
            entries.push((name.to_string(), group));
        }
        let registry = FeatureRegistry { version, entries };
        registry.validate()?;
        Ok(registry)
    }

    fn validate(&self) -> Result<(), RegistryError> {
        let mut seen = std::collections::HashSet::new();
        for (name, _) in &self.entries {
            if !seen.insert(name.as_str()) {
                return Err(RegistryError::DuplicateName(name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("registry manifest is empty")]
    EmptyManifest,
    #[error("bad registry manifest header: {0:?}")]
    BadHeader(String),
    #[error("bad registry manifest entry: {0:?}")]
    BadEntry(String),
    #[error("duplicate feature name {0:?}")]
    DuplicateName(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_group_sizes_match_the_study_set() {
        let r = FeatureRegistry::core();
        assert_eq!(r.group_size(FeatureGroup::Shimmer), 2);
        assert_eq!(r.group_size(FeatureGroup::F0), 10);
        assert_eq!(r.group_size(FeatureGroup::Jitter), 2);
        assert_eq!(r.group_size(FeatureGroup::Intensity), 10);
        assert_eq!(r.group_size(FeatureGroup::SpectralFlux), 2);
        assert_eq!(r.group_size(FeatureGroup::VoicedLen), 2);
        assert_eq!(r.group_size(FeatureGroup::PeakRateCvd), 2);
        assert_eq!(r.len(), 30);
    }

    #[test]
    fn full_registry_adds_36_extended_features() {
        let r = FeatureRegistry::full();
        assert_eq!(r.group_size(FeatureGroup::Extended), 36);
        assert_eq!(r.len(), 66);
    }

    #[test]
    fn names_are_unique_and_study_features_present() {
        let r = FeatureRegistry::full();
        let mut names: Vec<&str> = r.names().collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), r.len());
        for f in FeatureRegistry::study_features() {
            assert!(r.index_of(f).is_some(), "missing {f}");
        }
    }

    #[test]
    fn manifest_round_trips() {
        let r = FeatureRegistry::full();
        let text = r.manifest_text();
        let back = FeatureRegistry::parse_manifest_text(&text).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn group_columns_are_prefix_contiguous_in_ablation_order() {
        let r = FeatureRegistry::full();
        let mut expected = 0usize;
        for k in 1..=FeatureGroup::ABLATION_ORDER.len() {
            let cols = r.group_columns(&FeatureGroup::ABLATION_ORDER[..k]);
            expected += r.group_size(FeatureGroup::ABLATION_ORDER[k - 1]);
            assert_eq!(cols.len(), expected);
            assert_eq!(cols, (0..expected).collect::<Vec<_>>());
        }
    }

    #[test]
    fn headers_carry_group_prefix() {
        let r = FeatureRegistry::core();
        assert_eq!(r.headers()[0], "shimmer.shimmer_mean");
        assert_eq!(r.headers()[29], "peak_rate_cvd.cvd");
    }
}
