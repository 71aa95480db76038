//! Fundamental frequency estimation by normalized autocorrelation.
//!
//! Per frame, the normalized cross-correlation is evaluated over the lag
//! range implied by `[f_min, f_max]`; the best local peak (after a small
//! octave bonus that discourages subharmonic picks) decides the
//! candidate. A frame is voiced iff the peak correlation clears the
//! voicing threshold and the frame RMS clears the silence floor, which
//! is expressed relative to the loudest point of the segment. The lag is
//! refined by parabolic interpolation before conversion to Hz.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchConfig {
    /// Lower bound of the search range, Hz. Must be at least 50.
    pub f_min: f64,
    /// Upper bound of the search range, Hz. Must be at most 620.
    pub f_max: f64,
    /// Analysis window, seconds. Needs roughly two periods of `f_min`.
    pub window_length: f64,
    /// Hop between frames, seconds.
    pub hop_length: f64,
    /// Minimum normalized correlation for a voiced decision.
    pub voicing_threshold: f64,
    /// Silence floor in dB relative to the segment's peak amplitude.
    pub silence_floor_db: f64,
    /// Correlation bonus per octave above `f_min`, breaking ties in
    /// favor of the higher candidate.
    pub octave_cost: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        PitchConfig {
            f_min: 75.0,
            f_max: 500.0,
            window_length: 0.040,
            hop_length: 0.010,
            voicing_threshold: 0.45,
            silence_floor_db: -50.0,
            octave_cost: 0.01,
        }
    }
}

impl PitchConfig {
    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (self.window_length * sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ((self.hop_length * sample_rate as f64).round() as usize).max(1)
    }
}

/// Per-frame F0 analysis results, all tracks the same length.
#[derive(Debug, Clone)]
pub struct PitchTrack {
    /// F0 in Hz; 0 on unvoiced frames.
    pub f0: Vec<f64>,
    pub voiced: Vec<bool>,
    /// Peak normalized correlation of each frame (0 where degenerate).
    pub strength: Vec<f64>,
    pub hop_samples: usize,
    pub window_samples: usize,
    pub sample_rate: u32,
}

impl PitchTrack {
    pub fn hop_seconds(&self) -> f64 {
        self.hop_samples as f64 / self.sample_rate as f64
    }

    /// Pad with unvoiced frames up to `len`; used to align the pitch
    /// track with tracks computed from a shorter analysis window.
    pub fn pad_to(&mut self, len: usize) {
        while self.f0.len() < len {
            self.f0.push(0.0);
            self.voiced.push(false);
            self.strength.push(0.0);
        }
    }
}

/// Estimate F0 and a voicing decision for every frame.
///
/// Frames are anchored at `t * hop`; the last frame is the last one
/// whose full window fits. Signals shorter than one window produce an
/// empty track (callers treat that as fully unvoiced).
pub fn estimate_f0(samples: &[f64], sample_rate: u32, cfg: &PitchConfig) -> PitchTrack {
    let w = cfg.window_samples(sample_rate);
    let h = cfg.hop_samples(sample_rate);
    let sr = sample_rate as f64;

    let lag_min = ((sr / cfg.f_max).floor() as usize).max(2);
    let lag_max = ((sr / cfg.f_min).ceil() as usize).min(w.saturating_sub(2));

    let peak_amplitude = samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    let rms_floor = peak_amplitude * 10f64.powf(cfg.silence_floor_db / 20.0);

    let n_frames = if samples.len() >= w && lag_max > lag_min {
        (samples.len() - w) / h + 1
    } else {
        0
    };

    let mut f0 = Vec::with_capacity(n_frames);
    let mut voiced = Vec::with_capacity(n_frames);
    let mut strength = Vec::with_capacity(n_frames);

    for t in 0..n_frames {
        let frame = &samples[t * h..t * h + w];
        let (hz, vcd, r) = analyze_frame(frame, sr, lag_min, lag_max, rms_floor, cfg);
        f0.push(hz);
        voiced.push(vcd);
        strength.push(r);
    }

    PitchTrack {
        f0,
        voiced,
        strength,
        hop_samples: h,
        window_samples: w,
        sample_rate,
    }
}

fn analyze_frame(
    frame: &[f64],
    sr: f64,
    lag_min: usize,
    lag_max: usize,
    rms_floor: f64,
    cfg: &PitchConfig,
) -> (f64, bool, f64) {
    let w = frame.len();
    let rms = (frame.iter().map(|s| s * s).sum::<f64>() / w as f64).sqrt();
    if rms <= 0.0 {
        return (0.0, false, 0.0);
    }

    // prefix sums of squares for the normalization terms
    let mut sq_prefix = Vec::with_capacity(w + 1);
    sq_prefix.push(0.0);
    for &s in frame {
        sq_prefix.push(sq_prefix.last().unwrap() + s * s);
    }
    let energy = |a: usize, b: usize| sq_prefix[b] - sq_prefix[a];

    let mut ncc = vec![0.0f64; lag_max + 2];
    for lag in lag_min..=lag_max {
        let n = w - lag;
        let dot: f64 = frame[..n].iter().zip(&frame[lag..]).map(|(a, b)| a * b).sum();
        let denom = (energy(0, n) * energy(lag, w)).sqrt();
        ncc[lag] = if denom > 1e-300 { dot / denom } else { 0.0 };
    }

    // best local maximum by correlation plus octave bonus
    let mut best: Option<(usize, f64)> = None;
    for lag in (lag_min + 1)..lag_max {
        let r = ncc[lag];
        if r > ncc[lag - 1] && r >= ncc[lag + 1] {
            let bonus = cfg.octave_cost * (sr / lag as f64 / cfg.f_min).log2();
            let score = r + bonus;
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((lag, score));
            }
        }
    }
    let Some((lag, _)) = best else {
        return (0.0, false, 0.0);
    };
    let r_peak = ncc[lag];

    if r_peak < cfg.voicing_threshold || rms < rms_floor {
        return (0.0, false, r_peak.max(0.0));
    }

    // parabolic refinement of the lag
    let (rm, r0, rp) = (ncc[lag - 1], ncc[lag], ncc[lag + 1]);
    let denom = rm - 2.0 * r0 + rp;
    let delta = if denom.abs() > 1e-12 {
        (0.5 * (rm - rp) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let refined = lag as f64 + delta;
    let hz = (sr / refined).clamp(cfg.f_min, cfg.f_max);
    (hz, true, r_peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, seconds: f64, sr: u32) -> Vec<f64> {
        (0..(seconds * sr as f64) as usize)
            .map(|n| (2.0 * std::f64::consts::PI * freq * n as f64 / sr as f64).sin())
            .collect()
    }

    #[test]
    fn pure_220hz_sine_tracks_within_one_percent() {
        let track = estimate_f0(&sine(220.0, 2.0, 16000), 16000, &PitchConfig::default());
        let interior = &track.f0[5..track.f0.len() - 5];
        let interior_voiced = &track.voiced[5..track.voiced.len() - 5];
        assert!(interior_voiced.iter().all(|&v| v));
        for &hz in interior {
            assert!((hz - 220.0).abs() / 220.0 < 0.01, "f0 = {hz}");
        }
    }

    #[test]
    fn all_zero_signal_is_unvoiced() {
        let track = estimate_f0(&vec![0.0; 16000], 16000, &PitchConfig::default());
        assert!(!track.f0.is_empty());
        assert!(track.voiced.iter().all(|&v| !v));
        assert!(track.f0.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn seeded_white_noise_is_mostly_unvoiced() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise: Vec<f64> = (0..32000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let track = estimate_f0(&noise, 16000, &PitchConfig::default());
        let voiced = track.voiced.iter().filter(|&&v| v).count();
        let fraction = voiced as f64 / track.voiced.len() as f64;
        assert!(fraction < 0.15, "voiced fraction = {fraction}");
    }

    #[test]
    fn low_frequency_square_wave_resolves_fundamental() {
        let sr = 16000u32;
        let signal: Vec<f64> = (0..32000)
            .map(|n| {
                let phase = (n as f64 * 100.0 / sr as f64).fract();
                if phase < 0.5 {
                    0.8
                } else {
                    -0.8
                }
            })
            .collect();
        let track = estimate_f0(&signal, sr, &PitchConfig::default());
        let mid = track.f0.len() / 2;
        assert!(track.voiced[mid]);
        assert!((track.f0[mid] - 100.0).abs() < 2.0, "f0 = {}", track.f0[mid]);
    }

    #[test]
    fn amplitude_scaling_leaves_f0_unchanged() {
        let base = sine(220.0, 1.0, 16000);
        let scaled: Vec<f64> = base.iter().map(|s| s * 0.05).collect();
        let a = estimate_f0(&base, 16000, &PitchConfig::default());
        let b = estimate_f0(&scaled, 16000, &PitchConfig::default());
        assert_eq!(a.voiced, b.voiced);
        for (x, y) in a.f0.iter().zip(&b.f0) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
