//! Per-segment extraction pipeline: frame the signal, compute every LLD
//! track on a shared frame grid, detect glottal cycles, and reduce to a
//! feature vector.

use serde::{Deserialize, Serialize};

use crate::corpus::AudioClip;

use super::energy::{compute_intensity, rate_of_loudness_peaks};
use super::extended::{extended_llds, ExtendedTracks};
use super::fft::magnitude_spectra;
use super::flux::spectral_flux;
use super::frame::{frame_signal, FrameConfig};
use super::functionals::{apply_functionals, FeatureVector};
use super::periods::{detect_periods, PeriodSequence};
use super::pitch::{estimate_f0, PitchConfig};
use super::registry::FeatureRegistry;
use super::DspError;

/// Extraction parameters for the whole DSP stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DspConfig {
    /// Spectral/energy framing (25 ms, 10 ms hop by default). The pitch
    /// stage shares the hop but uses its own, longer window.
    pub frame: FrameConfig,
    pub pitch: PitchConfig,
    /// Minimum rise over both neighbors for a loudness peak, in dB.
    pub peak_delta_db: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        DspConfig {
            frame: FrameConfig::spectral(),
            pitch: PitchConfig::default(),
            peak_delta_db: 1.0,
        }
    }
}

/// Per-frame low-level descriptor tracks, all of one length.
#[derive(Debug, Clone)]
pub struct LldBundle {
    pub f0: Vec<f64>,
    pub voiced: Vec<bool>,
    /// Normalized autocorrelation peak behind each voicing decision.
    pub strength: Vec<f64>,
    pub intensity: Vec<f64>,
    pub spectral_flux: Vec<f64>,
    pub extended: ExtendedTracks,
    /// Loudness peaks per second (already a scalar of the intensity track).
    pub loudness_peak_rate: f64,
    pub hop_seconds: f64,
    pub n_frames: usize,
}

/// Compute every LLD track for one clip.
///
/// All tracks share the frame count of the spectral framing; pitch
/// frames whose longer window does not fit at the tail are unvoiced.
pub fn extract_lld_bundle(
    clip: &AudioClip,
    cfg: &DspConfig,
) -> Result<(LldBundle, PeriodSequence), DspError> {
    let sr = clip.sample_rate();
    let samples = clip.samples();

    let windowed = frame_signal(samples, sr, &cfg.frame)?;
    let rect_cfg = FrameConfig {
        window: super::frame::WindowFunction::Rect,
        ..cfg.frame
    };
    let raw = frame_signal(samples, sr, &rect_cfg)?;
    let n_frames = windowed.len();
    let hop_seconds = cfg.frame.hop_samples(sr) as f64 / sr as f64;

    let fft_len = cfg.frame.fft_len(sr);
    let spectra = magnitude_spectra(&windowed, fft_len);
    let flux = spectral_flux(&spectra);
    let intensity = compute_intensity(&raw);
    let loudness_peak_rate = rate_of_loudness_peaks(&intensity, hop_seconds, cfg.peak_delta_db);

    let mut pitch = estimate_f0(samples, sr, &cfg.pitch);
    pitch.pad_to(n_frames);
    pitch.f0.truncate(n_frames);
    pitch.voiced.truncate(n_frames);
    pitch.strength.truncate(n_frames);

    let periods = match detect_periods(samples, sr, &pitch) {
        Ok(seq) => seq,
        Err(DspError::NoVoicedRegion) => PeriodSequence::default(),
        Err(e) => return Err(e),
    };

    let extended = extended_llds(&raw, &spectra, &pitch.strength, sr, fft_len);

    Ok((
        LldBundle {
            f0: pitch.f0,
            voiced: pitch.voiced,
            strength: pitch.strength,
            intensity,
            spectral_flux: flux,
            extended,
            loudness_peak_rate,
            hop_seconds,
            n_frames,
        },
        periods,
    ))
}

/// Full per-segment feature extraction: bundle plus functionals.
pub fn extract_features(
    clip: &AudioClip,
    cfg: &DspConfig,
    registry: &FeatureRegistry,
) -> Result<FeatureVector, DspError> {
    let (bundle, periods) = extract_lld_bundle(clip, cfg)?;
    Ok(apply_functionals(&bundle, &periods, registry))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone_clip(freq: f64, seconds: f64, sr: u32, amplitude: f64) -> AudioClip {
        let samples: Vec<f64> = (0..(seconds * sr as f64) as usize)
            .map(|n| amplitude * (2.0 * std::f64::consts::PI * freq * n as f64 / sr as f64).sin())
            .collect();
        AudioClip::from_samples(samples, sr)
    }

    #[test]
    fn tracks_share_one_frame_count() {
        let clip = tone_clip(220.0, 1.0, 16000, 0.8);
        let (bundle, _) = extract_lld_bundle(&clip, &DspConfig::default()).unwrap();
        assert_eq!(bundle.f0.len(), bundle.n_frames);
        assert_eq!(bundle.voiced.len(), bundle.n_frames);
        assert_eq!(bundle.intensity.len(), bundle.n_frames);
        assert_eq!(bundle.spectral_flux.len(), bundle.n_frames);
        assert_eq!(bundle.extended.len(), bundle.n_frames);
        // f0 > 0 iff voiced
        for (f, v) in bundle.f0.iter().zip(&bundle.voiced) {
            assert_eq!(*f > 0.0, *v);
        }
        assert_eq!(bundle.spectral_flux[0], 0.0);
        assert!(bundle.spectral_flux.iter().all(|&f| f >= 0.0));
    }

    #[test]
    fn feature_vector_length_matches_registry() {
        let clip = tone_clip(220.0, 0.5, 16000, 0.8);
        for registry in [FeatureRegistry::core(), FeatureRegistry::full()] {
            let fv = extract_features(&clip, &DspConfig::default(), &registry).unwrap();
            assert_eq!(fv.values.len(), registry.len());
            assert!(fv.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn fully_unvoiced_segment_imputes_f0_family() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let noise: Vec<f64> = (0..8000).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let clip = AudioClip::from_samples(noise, 16000);
        let registry = FeatureRegistry::core();
        let fv = extract_features(&clip, &DspConfig::default(), &registry).unwrap();
        assert_eq!(fv.values.len(), registry.len());
        // all F0/jitter/shimmer functionals imputed
        for name in ["shimmer_mean", "f0_mean", "f0_p50", "jitter_mean"] {
            assert!(
                fv.degenerate.iter().any(|d| d == name),
                "{name} not flagged; flags = {:?}",
                fv.degenerate
            );
            assert_eq!(fv.values[registry.index_of(name).unwrap()], 0.0);
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let clip = tone_clip(220.0, 0.7, 16000, 0.5);
        let registry = FeatureRegistry::full();
        let a = extract_features(&clip, &DspConfig::default(), &registry).unwrap();
        let b = extract_features(&clip, &DspConfig::default(), &registry).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn amplitude_scaling_shifts_intensity_only() {
        let clip = tone_clip(220.0, 1.0, 16000, 0.4);
        let gain = 2.0;
        let scaled = AudioClip::from_samples(
            clip.samples().iter().map(|s| s * gain).collect(),
            clip.sample_rate(),
        );
        let registry = FeatureRegistry::core();
        let a = extract_features(&clip, &DspConfig::default(), &registry).unwrap();
        let b = extract_features(&scaled, &DspConfig::default(), &registry).unwrap();

        let idx = |n: &str| registry.index_of(n).unwrap();
        let shift = b.values[idx("intensity_mean")] - a.values[idx("intensity_mean")];
        assert!((shift - 20.0 * gain.log10()).abs() < 0.01, "shift = {shift}");
        for name in ["f0_mean", "jitter_mean", "shimmer_mean", "mvd", "mvl", "cvd", "rlp"] {
            let (x, y) = (a.values[idx(name)], b.values[idx(name)]);
            assert!(
                (x - y).abs() <= 1e-9 + 0.02 * x.abs(),
                "{name}: {x} vs {y}"
            );
        }
    }

    #[test]
    fn hop_shift_of_stationary_signal_barely_moves_functionals() {
        let sr = 16000u32;
        let long = tone_clip(220.0, 2.0, sr, 0.6);
        let hop = 160usize;
        let shifted = AudioClip::from_samples(long.samples()[hop..].to_vec(), sr);
        let trimmed = AudioClip::from_samples(
            long.samples()[..long.samples().len() - hop].to_vec(),
            sr,
        );
        let registry = FeatureRegistry::core();
        let a = extract_features(&trimmed, &DspConfig::default(), &registry).unwrap();
        let b = extract_features(&shifted, &DspConfig::default(), &registry).unwrap();
        for ((name, _), (x, y)) in registry.entries().iter().zip(a.values.iter().zip(&b.values)) {
            // 1% relative, with a small absolute floor for the
            // functionals that are essentially zero on a pure tone
            let tol = (0.01 * x.abs()).max(0.005);
            assert!((x - y).abs() <= tol, "{name}: {x} vs {y}");
        }
    }
}
