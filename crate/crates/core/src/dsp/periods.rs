//! Glottal cycle detection and the local jitter/shimmer measures.
//!
//! Within each continuous voiced region, cycle marks are placed by
//! walking outward from the strongest waveform peak, searching for the
//! next peak at a spacing guided by the local pitch period. Marks are
//! refined to sub-sample precision so that an exactly periodic signal
//! measures zero jitter regardless of how its period aligns with the
//! sample grid.

use super::pitch::PitchTrack;
use super::DspError;

/// Cycles detected within one continuous voiced region.
#[derive(Debug, Clone)]
pub struct RegionCycles {
    /// Period lengths T_i in seconds, one per glottal cycle.
    pub periods: Vec<f64>,
    /// Absolute waveform peak within each cycle.
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct PeriodSequence {
    pub regions: Vec<RegionCycles>,
}

impl PeriodSequence {
    pub fn total_periods(&self) -> usize {
        self.regions.iter().map(|r| r.periods.len()).sum()
    }
}

/// A perturbation measure plus a degeneracy marker for the 0/0 case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub value: f64,
    pub degenerate: bool,
}

/// Search window for the next cycle peak, as multiples of the local
/// period. The lower edge sits well below one period so that alternating
/// short/long cycles are still caught individually.
const SEARCH_LO: f64 = 0.3;
const SEARCH_HI: f64 = 1.5;

/// A candidate peak must reach this fraction of the previous mark's
/// amplitude; the walk takes the nearest such peak rather than the
/// largest one, so weaker cycles between strong ones are not skipped.
const PEAK_FLOOR: f64 = 0.5;

/// Detect glottal cycles under the voiced regions of `pitch`.
pub fn detect_periods(
    samples: &[f64],
    sample_rate: u32,
    pitch: &PitchTrack,
) -> Result<PeriodSequence, DspError> {
    if !pitch.voiced.iter().any(|&v| v) {
        return Err(DspError::NoVoicedRegion);
    }
    let sr = sample_rate as f64;
    let hop = pitch.hop_samples;
    let win = pitch.window_samples;

    let mut regions = Vec::new();
    let mut t = 0usize;
    while t < pitch.voiced.len() {
        if !pitch.voiced[t] {
            t += 1;
            continue;
        }
        let start_frame = t;
        while t < pitch.voiced.len() && pitch.voiced[t] {
            t += 1;
        }
        let end_frame = t - 1;

        let span_start = start_frame * hop;
        let span_end = (end_frame * hop + win).min(samples.len());
        if span_end <= span_start + 2 {
            continue;
        }
        let span = &samples[span_start..span_end];

        let local_period = |offset: usize| -> f64 {
            let frame = ((span_start + offset) / hop).clamp(start_frame, end_frame);
            let hz = pitch.f0[frame];
            if hz > 0.0 {
                sr / hz
            } else {
                sr / 100.0
            }
        };

        if let Some(cycles) = mark_cycles(span, local_period, sr) {
            regions.push(cycles);
        }
    }

    Ok(PeriodSequence { regions })
}

/// Place cycle marks on one voiced span and convert them to periods and
/// per-cycle peak amplitudes. Returns `None` when fewer than two marks
/// are found.
fn mark_cycles(span: &[f64], local_period: impl Fn(usize) -> f64, sr: f64) -> Option<RegionCycles> {
    // Work on one polarity so each cycle contributes a single peak.
    let max_pos = span.iter().cloned().fold(f64::MIN, f64::max);
    let max_neg = span.iter().map(|&s| -s).fold(f64::MIN, f64::max);
    let sign = if max_pos >= max_neg { 1.0 } else { -1.0 };
    let p: Vec<f64> = span.iter().map(|&s| s * sign).collect();
    let n = p.len();

    let is_peak = |i: usize| i > 0 && i + 1 < n && p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > 0.0;

    // nearest qualifying peak in [a, b); falls back to the strongest
    // sub-threshold peak when none qualifies
    let find_peak = |a: usize, b: usize, threshold: f64, from_low_side: bool| -> Option<usize> {
        let (a, b) = (a.min(n), b.min(n));
        let mut fallback: Option<usize> = None;
        let range: Box<dyn Iterator<Item = usize>> = if from_low_side {
            Box::new(a..b)
        } else {
            Box::new((a..b).rev())
        };
        for i in range {
            if is_peak(i) {
                if p[i] >= threshold {
                    return Some(i);
                }
                if fallback.map_or(true, |f| p[i] > p[f]) {
                    fallback = Some(i);
                }
            }
        }
        fallback
    };

    let anchor = {
        let mut best = 0;
        for i in 1..n {
            if p[i] > p[best] {
                best = i;
            }
        }
        best
    };
    if p[anchor] <= 0.0 {
        return None;
    }

    let mut marks = vec![anchor];
    // forward walk
    let mut m = anchor;
    loop {
        let period = local_period(m);
        let lo = m + (SEARCH_LO * period).round().max(1.0) as usize;
        let hi = m + (SEARCH_HI * period).round() as usize + 1;
        match find_peak(lo, hi, PEAK_FLOOR * p[m], true) {
            Some(next) => {
                marks.push(next);
                m = next;
            }
            None => break,
        }
    }
    // backward walk, scanning outward from the mark
    m = anchor;
    loop {
        let period = local_period(m);
        let hi = m.saturating_sub((SEARCH_LO * period).round().max(1.0) as usize) + 1;
        let lo = m.saturating_sub((SEARCH_HI * period).round() as usize);
        match find_peak(lo, hi, PEAK_FLOOR * p[m], false) {
            Some(prev) if prev < m => {
                marks.push(prev);
                m = prev;
            }
            _ => break,
        }
    }
    marks.sort_unstable();
    marks.dedup();
    if marks.len() < 2 {
        return None;
    }

    // sub-sample refinement of mark positions
    let refined: Vec<f64> = marks.iter().map(|&i| refine_peak_position(&p, i)).collect();

    let mut periods = Vec::with_capacity(marks.len() - 1);
    let mut amplitudes = Vec::with_capacity(marks.len() - 1);
    for k in 0..marks.len() - 1 {
        let t = (refined[k + 1] - refined[k]) / sr;
        if t <= 0.0 {
            continue;
        }
        periods.push(t);
        amplitudes.push(cycle_peak_amplitude(span, marks[k], marks[k + 1]));
    }
    if periods.is_empty() {
        return None;
    }
    Some(RegionCycles { periods, amplitudes })
}

fn refine_peak_position(p: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= p.len() {
        return i as f64;
    }
    let (a, b, c) = (p[i - 1], p[i], p[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-12 {
        return i as f64;
    }
    i as f64 + (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

/// Absolute peak within the cycle `[from, to)`, refined by a parabola
/// through the discrete maximum so that sampled sinusoids report their
/// true crest height.
fn cycle_peak_amplitude(span: &[f64], from: usize, to: usize) -> f64 {
    let to = to.min(span.len());
    let mut best = from;
    for i in from..to {
        if span[i].abs() > span[best].abs() {
            best = i;
        }
    }
    if best == 0 || best + 1 >= span.len() {
        return span[best].abs();
    }
    let sign = if span[best] >= 0.0 { 1.0 } else { -1.0 };
    let (a, b, c) = (
        sign * span[best - 1],
        sign * span[best],
        sign * span[best + 1],
    );
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-12 {
        return b;
    }
    let delta = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    (b - 0.25 * (a - c) * delta).abs()
}

/// Mean absolute consecutive period difference over the mean period.
/// Pairs never straddle voiced-region boundaries.
pub fn jitter_local(seq: &PeriodSequence) -> Result<f64, DspError> {
    let mut diff_sum = 0.0;
    let mut diff_count = 0usize;
    let mut period_sum = 0.0;
    let mut period_count = 0usize;
    for region in &seq.regions {
        for pair in region.periods.windows(2) {
            diff_sum += (pair[1] - pair[0]).abs();
            diff_count += 1;
        }
        period_sum += region.periods.iter().sum::<f64>();
        period_count += region.periods.len();
    }
    if diff_count == 0 {
        return Err(DspError::InsufficientPeriods);
    }
    Ok((diff_sum / diff_count as f64) / (period_sum / period_count as f64))
}

/// Mean absolute consecutive amplitude difference over the mean
/// amplitude; an all-zero amplitude sequence reports 0 with the
/// degenerate marker set instead of dividing by zero.
pub fn shimmer_local(seq: &PeriodSequence) -> Result<Perturbation, DspError> {
    let mut diff_sum = 0.0;
    let mut diff_count = 0usize;
    let mut amp_sum = 0.0;
    let mut amp_count = 0usize;
    for region in &seq.regions {
        for pair in region.amplitudes.windows(2) {
            diff_sum += (pair[1] - pair[0]).abs();
            diff_count += 1;
        }
        amp_sum += region.amplitudes.iter().sum::<f64>();
        amp_count += region.amplitudes.len();
    }
    if diff_count == 0 {
        return Err(DspError::InsufficientPeriods);
    }
    let mean_amp = amp_sum / amp_count as f64;
    if mean_amp <= 0.0 {
        return Ok(Perturbation {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(Perturbation {
        value: (diff_sum / diff_count as f64) / mean_amp,
        degenerate: false,
    })
}

/// Per-region jitter values, for the mean/std functionals. Regions with
/// fewer than two periods contribute nothing.
pub fn jitter_per_region(seq: &PeriodSequence) -> Vec<f64> {
    seq.regions
        .iter()
        .filter(|r| r.periods.len() >= 2)
        .map(|r| {
            let diffs: f64 = r.periods.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
            let mean_t = r.periods.iter().sum::<f64>() / r.periods.len() as f64;
            (diffs / (r.periods.len() - 1) as f64) / mean_t
        })
        .collect()
}

/// Per-region shimmer values; a region with zero mean amplitude yields
/// 0 with the degenerate marker.
pub fn shimmer_per_region(seq: &PeriodSequence) -> Vec<Perturbation> {
    seq.regions
        .iter()
        .filter(|r| r.amplitudes.len() >= 2)
        .map(|r| {
            let diffs: f64 = r.amplitudes.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
            let mean_a = r.amplitudes.iter().sum::<f64>() / r.amplitudes.len() as f64;
            if mean_a <= 0.0 {
                Perturbation { value: 0.0, degenerate: true }
            } else {
                Perturbation {
                    value: (diffs / (r.amplitudes.len() - 1) as f64) / mean_a,
                    degenerate: false,
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::pitch::{estimate_f0, PitchConfig};

    /// Impulse train with the given inter-pulse gaps (in samples),
    /// cycling through `amps` for the pulse heights.
    fn impulse_train(gaps: &[usize], amps: &[f64], len: usize) -> Vec<f64> {
        let mut x = vec![0.0; len];
        let mut pos = 0usize;
        let mut k = 0usize;
        while pos < len {
            x[pos] = amps[k % amps.len()];
            pos += gaps[k % gaps.len()];
            k += 1;
        }
        x
    }

    fn analyze(signal: &[f64], sr: u32) -> PeriodSequence {
        let track = estimate_f0(signal, sr, &PitchConfig::default());
        detect_periods(signal, sr, &track).unwrap()
    }

    #[test]
    fn exact_impulse_train_has_constant_periods() {
        // period 5 ms at 16 kHz = 80 samples
        let signal = impulse_train(&[80], &[1.0], 32000);
        let seq = analyze(&signal, 16000);
        assert!(seq.total_periods() > 100);
        for region in &seq.regions {
            for &t in &region.periods {
                assert!((t - 0.005).abs() < 1e-9, "T = {t}");
            }
            for &a in &region.amplitudes {
                assert!((a - 1.0).abs() < 1e-9);
            }
        }
        assert!(jitter_local(&seq).unwrap() < 1e-9);
        assert!(shimmer_local(&seq).unwrap().value < 1e-9);
    }

    #[test]
    fn alternating_period_train_recovers_both_periods() {
        // 4.5 ms / 5.5 ms alternation = 72 / 88 samples at 16 kHz
        let signal = impulse_train(&[72, 88], &[1.0], 32000);
        let seq = analyze(&signal, 16000);
        let mut all: Vec<f64> = Vec::new();
        for region in &seq.regions {
            all.extend(&region.periods);
        }
        assert!(all.len() > 100);
        for pair in all.windows(2) {
            assert!((pair[0] + pair[1] - 0.010).abs() < 1e-6);
            assert!(((pair[0] - pair[1]).abs() - 0.001).abs() < 1e-6);
        }
        let jitter = jitter_local(&seq).unwrap();
        assert!((jitter - 0.2).abs() < 0.01, "jitter = {jitter}");
    }

    #[test]
    fn alternating_amplitude_train_measures_shimmer() {
        let signal = impulse_train(&[80], &[0.9, 1.1], 32000);
        let seq = analyze(&signal, 16000);
        let shimmer = shimmer_local(&seq).unwrap();
        assert!(!shimmer.degenerate);
        assert!((shimmer.value - 0.2).abs() < 0.01, "shimmer = {}", shimmer.value);
        let jitter = jitter_local(&seq).unwrap();
        assert!(jitter < 1e-6);
    }

    #[test]
    fn fully_unvoiced_input_is_no_voiced_region() {
        let silence = vec![0.0; 16000];
        let track = estimate_f0(&silence, 16000, &PitchConfig::default());
        assert!(matches!(
            detect_periods(&silence, 16000, &track),
            Err(DspError::NoVoicedRegion)
        ));
    }

    #[test]
    fn single_period_is_insufficient_for_jitter() {
        let seq = PeriodSequence {
            regions: vec![RegionCycles {
                periods: vec![0.005],
                amplitudes: vec![1.0],
            }],
        };
        assert!(matches!(jitter_local(&seq), Err(DspError::InsufficientPeriods)));
        assert!(matches!(shimmer_local(&seq), Err(DspError::InsufficientPeriods)));
    }

    #[test]
    fn all_zero_amplitudes_guarded_as_degenerate() {
        let seq = PeriodSequence {
            regions: vec![RegionCycles {
                periods: vec![0.005, 0.005, 0.005],
                amplitudes: vec![0.0, 0.0, 0.0],
            }],
        };
        let s = shimmer_local(&seq).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.degenerate);
    }

    #[test]
    fn hand_arithmetic_fixtures() {
        let seq = PeriodSequence {
            regions: vec![RegionCycles {
                periods: vec![0.0045, 0.0055, 0.0045, 0.0055],
                amplitudes: vec![0.9, 1.1, 0.9, 1.1],
            }],
        };
        assert!((jitter_local(&seq).unwrap() - 0.2).abs() < 1e-12);
        assert!((shimmer_local(&seq).unwrap().value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn periodic_sine_has_near_zero_jitter_and_shimmer() {
        let sr = 16000u32;
        let signal: Vec<f64> = (0..32000)
            .map(|n| (2.0 * std::f64::consts::PI * 220.0 * n as f64 / sr as f64).sin())
            .collect();
        let seq = analyze(&signal, sr);
        assert!(jitter_local(&seq).unwrap() < 1e-3);
        assert!(shimmer_local(&seq).unwrap().value < 1e-3);
    }

    #[test]
    fn pairs_do_not_straddle_region_boundaries() {
        // two regions whose boundary periods differ wildly; pooled jitter
        // must ignore the cross-boundary pair
        let seq = PeriodSequence {
            regions: vec![
                RegionCycles { periods: vec![0.004, 0.004], amplitudes: vec![1.0, 1.0] },
                RegionCycles { periods: vec![0.008, 0.008], amplitudes: vec![1.0, 1.0] },
            ],
        };
        assert_eq!(jitter_local(&seq).unwrap(), 0.0);
    }
}
