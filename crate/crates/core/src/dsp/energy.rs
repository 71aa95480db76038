//! Frame energy in dB and the loudness-peak rate.

/// Floor constant keeping silent frames at -120 dB.
const ENERGY_EPS: f64 = 1e-12;

/// Per-frame intensity: `10*log10(mean_square + 1e-12)`.
///
/// Frames are expected unwindowed (rectangular), so a full-scale square
/// wave reads exactly 0 dB.
pub fn compute_intensity(frames: &[Vec<f64>]) -> Vec<f64> {
    frames
        .iter()
        .map(|frame| {
            let ms = frame.iter().map(|s| s * s).sum::<f64>() / frame.len().max(1) as f64;
            10.0 * (ms + ENERGY_EPS).log10()
        })
        .collect()
}

/// Count of intensity maxima exceeding both neighbors by at least
/// `peak_delta` dB, per second of track.
pub fn rate_of_loudness_peaks(intensity: &[f64], hop_seconds: f64, peak_delta: f64) -> f64 {
    let duration = intensity.len() as f64 * hop_seconds;
    if duration <= 0.0 {
        return 0.0;
    }
    let mut count = 0usize;
    for t in 1..intensity.len().saturating_sub(1) {
        if intensity[t] >= intensity[t - 1] + peak_delta && intensity[t] >= intensity[t + 1] + peak_delta {
            count += 1;
        }
    }
    count as f64 / duration
}
