//! Acoustic feature extraction: framing, pitch, voice quality, spectral
//! descriptors, and the functionals that turn tracks into features.

mod bundle;
mod energy;
mod extended;
mod fft;
mod flux;
mod frame;
mod functionals;
mod periods;
mod pitch;
mod registry;
mod voicing;

pub use bundle::{extract_features, extract_lld_bundle, DspConfig, LldBundle};
pub use energy::{compute_intensity, rate_of_loudness_peaks};
pub use extended::{extended_llds, hnr_from_strength, ExtendedTracks};
pub use fft::{bin_frequency, magnitude_spectra};
pub use flux::spectral_flux;
pub use frame::{frame_count, frame_signal, FrameConfig, WindowFunction};
pub use functionals::{
    apply_functionals, mean, monotone_run_slopes, percentile, std_pop, FeatureVector,
};
pub use periods::{
    detect_periods, jitter_local, jitter_per_region, shimmer_local, shimmer_per_region,
    PeriodSequence, Perturbation, RegionCycles,
};
pub use pitch::{estimate_f0, PitchConfig, PitchTrack};
pub use registry::{FeatureGroup, FeatureRegistry, RegistryError, REGISTRY_VERSION};
pub use voicing::{voiced_region_stats, VoicedStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("signal too short: {samples} samples for a {window}-sample analysis window")]
    TooShort { samples: usize, window: usize },
    #[error("no voiced region in segment")]
    NoVoicedRegion,
    #[error("fewer than two periods in every voiced region")]
    InsufficientPeriods,
}
