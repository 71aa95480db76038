//! Pipeline configuration: a TOML file with full defaulting and strict
//! key checking. Every CLI flag overrides its config key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use aggrospeech::classifier::{GammaSpec, GridSpec, KernelKind, SplitSpec, TrainOptions};
use aggrospeech::corpus::{LanguageFilter, SegmentConfig};
use aggrospeech::dsp::{DspConfig, FeatureRegistry, FrameConfig, PitchConfig, WindowFunction};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub frame: FrameSection,
    #[serde(default)]
    pub pitch: PitchSection,
    #[serde(default)]
    pub features: FeaturesSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub classifier: ClassifierSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Corpus manifest CSV (audio,textgrid,language).
    pub manifest: Option<PathBuf>,
    pub language: String,
    pub aggression_tier: String,
    pub turn_tier: String,
    pub min_segment_duration: f64,
    /// Seconds the annotation may extend past the audio.
    pub duration_tolerance: f64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        let seg = SegmentConfig::default();
        CorpusSection {
            manifest: None,
            language: "all".to_string(),
            aggression_tier: seg.aggression_tier,
            turn_tier: seg.turn_tier,
            min_segment_duration: seg.min_duration,
            duration_tolerance: seg.duration_tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub window_length: f64,
    pub hop_length: f64,
    pub window: String,
}

impl Default for FrameSection {
    fn default() -> Self {
        FrameSection {
            window_length: 0.025,
            hop_length: 0.010,
            window: "hann".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchSection {
    pub f_min: f64,
    pub f_max: f64,
    pub window_length: f64,
    pub voicing_threshold: f64,
    pub silence_floor_db: f64,
    pub octave_cost: f64,
}

impl Default for PitchSection {
    fn default() -> Self {
        let p = PitchConfig::default();
        PitchSection {
            f_min: p.f_min,
            f_max: p.f_max,
            window_length: p.window_length,
            voicing_threshold: p.voicing_threshold,
            silence_floor_db: p.silence_floor_db,
            octave_cost: p.octave_cost,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    /// "core" (30 study features) or "full" (adds the extended set).
    pub registry: String,
    pub peak_delta_db: f64,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        FeaturesSection {
            registry: "full".to_string(),
            peak_delta_db: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub seed: u64,
    pub fractions: [f64; 3],
    pub stratified: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        let s = SplitSpec::default();
        SplitSection {
            seed: s.seed,
            fractions: [s.fractions.0, s.fractions.1, s.fractions.2],
            stratified: s.stratified,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub kernels: Vec<String>,
    pub c: Vec<f64>,
    pub gamma: Vec<toml::Value>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            kernels: vec!["linear".to_string(), "rbf".to_string()],
            c: vec![0.1, 1.0, 10.0, 100.0],
            gamma: vec![
                toml::Value::String("1/d".to_string()),
                toml::Value::Float(0.01),
                toml::Value::Float(0.1),
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub smo_tolerance: f64,
    pub max_passes: usize,
    pub max_sweeps: usize,
    pub class_weight: bool,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let o = TrainOptions::default();
        ClassifierSection {
            smo_tolerance: o.smo_tolerance,
            max_passes: o.max_passes,
            max_sweeps: o.max_sweeps,
            class_weight: o.class_weight,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config value error: {0}")]
    Value(String),
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: PipelineConfig = toml::from_str(&text)?;
        config.validated()
    }

    fn validated(self) -> Result<Self, ConfigError> {
        self.language_filter()?;
        self.window_function()?;
        self.registry()?;
        self.grid_spec()?;
        if self.pitch.f_min < 50.0 || self.pitch.f_max > 620.0 || self.pitch.f_min >= self.pitch.f_max {
            return Err(ConfigError::Value(format!(
                "pitch range [{}, {}] outside the supported [50, 620] Hz window",
                self.pitch.f_min, self.pitch.f_max
            )));
        }
        if self.frame.hop_length <= 0.0 || self.frame.hop_length > self.frame.window_length {
            return Err(ConfigError::Value(
                "frame.hop_length must be positive and at most window_length".to_string(),
            ));
        }
        Ok(self)
    }

    pub fn language_filter(&self) -> Result<LanguageFilter, ConfigError> {
        LanguageFilter::parse(&self.corpus.language).ok_or_else(|| {
            ConfigError::Value(format!(
                "corpus.language {:?} (expected \"hi\", \"en\", or \"all\")",
                self.corpus.language
            ))
        })
    }

    fn window_function(&self) -> Result<WindowFunction, ConfigError> {
        match self.frame.window.as_str() {
            "hann" => Ok(WindowFunction::Hann),
            "hamming" => Ok(WindowFunction::Hamming),
            "rect" => Ok(WindowFunction::Rect),
            other => Err(ConfigError::Value(format!(
                "frame.window {other:?} (expected \"hann\", \"hamming\", or \"rect\")"
            ))),
        }
    }

    pub fn registry(&self) -> Result<FeatureRegistry, ConfigError> {
        match self.features.registry.as_str() {
            "core" => Ok(FeatureRegistry::core()),
            "full" => Ok(FeatureRegistry::full()),
            other => Err(ConfigError::Value(format!(
                "features.registry {other:?} (expected \"core\" or \"full\")"
            ))),
        }
    }

    pub fn segment_config(&self) -> SegmentConfig {
        SegmentConfig {
            aggression_tier: self.corpus.aggression_tier.clone(),
            turn_tier: self.corpus.turn_tier.clone(),
            min_duration: self.corpus.min_segment_duration,
            duration_tolerance: self.corpus.duration_tolerance,
        }
    }

    pub fn dsp_config(&self) -> DspConfig {
        DspConfig {
            frame: FrameConfig {
                window_length: self.frame.window_length,
                hop_length: self.frame.hop_length,
                window: self.window_function().expect("validated on load"),
                fft_size: None,
            },
            pitch: PitchConfig {
                f_min: self.pitch.f_min,
                f_max: self.pitch.f_max,
                window_length: self.pitch.window_length,
                hop_length: self.frame.hop_length,
                voicing_threshold: self.pitch.voicing_threshold,
                silence_floor_db: self.pitch.silence_floor_db,
                octave_cost: self.pitch.octave_cost,
            },
            peak_delta_db: self.features.peak_delta_db,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            fractions: (
                self.split.fractions[0],
                self.split.fractions[1],
                self.split.fractions[2],
            ),
            seed: self.split.seed,
            stratified: self.split.stratified,
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        let mut kernels = Vec::new();
        for k in &self.grid.kernels {
            match k.as_str() {
                "linear" => kernels.push(KernelKind::Linear),
                "rbf" => kernels.push(KernelKind::Rbf),
                other => {
                    return Err(ConfigError::Value(format!(
                        "grid.kernels entry {other:?} (expected \"linear\" or \"rbf\")"
                    )))
                }
            }
        }
        let mut gammas = Vec::new();
        for g in &self.grid.gamma {
            match g {
                toml::Value::String(s) if s == "1/d" => gammas.push(GammaSpec::INV_DIM),
                toml::Value::Float(f) if *f > 0.0 => gammas.push(GammaSpec::Fixed(*f)),
                toml::Value::Integer(i) if *i > 0 => gammas.push(GammaSpec::Fixed(*i as f64)),
                other => {
                    return Err(ConfigError::Value(format!(
                        "grid.gamma entry {other:?} (expected \"1/d\" or a positive number)"
                    )))
                }
            }
        }
        if self.grid.c.iter().any(|&c| c <= 0.0) {
            return Err(ConfigError::Value("grid.c values must be positive".to_string()));
        }
        Ok(GridSpec {
            kernels,
            c_values: self.grid.c.clone(),
            gammas,
        })
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            smo_tolerance: self.classifier.smo_tolerance,
            max_passes: self.classifier.max_passes,
            max_sweeps: self.classifier.max_sweeps,
            class_weight: self.classifier.class_weight,
            seed: self.split.seed,
        }
    }

    /// Canonical serialization used for the config hash in run manifests.
    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gets_defaults() {
        let config: PipelineConfig = toml::from_str("").unwrap();
        let config = config.validated().unwrap();
        assert_eq!(config.split.seed, 42);
        assert_eq!(config.features.registry, "full");
        assert_eq!(config.grid.c, vec![0.1, 1.0, 10.0, 100.0]);
        assert_eq!(config.output.dir, PathBuf::from("out"));
        let grid = config.grid_spec().unwrap();
        assert_eq!(grid.kernels.len(), 2);
        assert_eq!(grid.gammas.len(), 3);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = toml::from_str::<PipelineConfig>("[split]\nseed = 1\nshuffle = true\n");
        assert!(err.is_err());
        let err = toml::from_str::<PipelineConfig>("[nonexistent]\nx = 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn bad_values_rejected() {
        let config: PipelineConfig =
            toml::from_str("[pitch]\nf_min = 10.0\nf_max = 500.0\nwindow_length = 0.04\nvoicing_threshold = 0.45\nsilence_floor_db = -50.0\noctave_cost = 0.01\n")
                .unwrap();
        assert!(config.validated().is_err());
    }

    #[test]
    fn gamma_entries_parse_both_forms() {
        let config: PipelineConfig =
            toml::from_str("[grid]\nkernels = [\"rbf\"]\nc = [1.0]\ngamma = [\"1/d\", 0.5]\n")
                .unwrap();
        let grid = config.grid_spec().unwrap();
        assert_eq!(grid.gammas[0].resolve(10), 0.1);
        assert_eq!(grid.gammas[1].resolve(10), 0.5);
    }
}
