//! Functionals: statistics mapping an LLD track to scalar features,
//! applied according to the feature registry.
//!
//! Conventions fixed here: standard deviation is the population form
//! (divide by n); percentiles interpolate linearly between order
//! statistics; a functional whose support is empty (such as F0
//! statistics of a fully unvoiced segment) imputes 0.0 and records the
//! feature name as degenerate.

use super::bundle::LldBundle;
use super::periods::{jitter_per_region, shimmer_per_region, PeriodSequence};
use super::registry::{FeatureGroup, FeatureRegistry};
use super::voicing::voiced_region_stats;

/// One row of the dataset: values aligned to a registry, plus the names
/// of any features that had to be imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub degenerate: Vec<String>,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Population standard deviation.
pub fn std_pop(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    Some(var.sqrt())
}

/// Percentile in [0, 100] with linear interpolation between order
/// statistics.
pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let h = (sorted.len() - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        Some(sorted[lo])
    } else {
        Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
    }
}

/// Slopes of maximal strictly monotone runs of a track. A run of length
/// `l >= 2` spans `(l-1) * hop` seconds; its slope is
/// `(last - first) / span`. Returns (rising slopes, falling slopes).
pub fn monotone_run_slopes(track: &[f64], hop_seconds: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rising = Vec::new();
    let mut falling = Vec::new();
    let mut i = 0usize;
    while i + 1 < track.len() {
        if track[i + 1] > track[i] {
            let start = i;
            while i + 1 < track.len() && track[i + 1] > track[i] {
                i += 1;
            }
            rising.push((track[i] - track[start]) / ((i - start) as f64 * hop_seconds));
        } else if track[i + 1] < track[i] {
            let start = i;
            while i + 1 < track.len() && track[i + 1] < track[i] {
                i += 1;
            }
            falling.push((track[i] - track[start]) / ((i - start) as f64 * hop_seconds));
        } else {
            i += 1;
        }
    }
    (rising, falling)
}

struct Emitter {
    values: Vec<f64>,
    degenerate: Vec<String>,
}

impl Emitter {
    fn push(&mut self, name: &str, value: Option<f64>) {
        match value {
            Some(v) if v.is_finite() => self.values.push(v),
            _ => {
                self.values.push(0.0);
                self.degenerate.push(name.to_string());
            }
        }
    }
}

fn ten_functionals(emitter: &mut Emitter, prefix: &str, values: &[f64], runs: &(Vec<f64>, Vec<f64>)) {
    let p20 = percentile(values, 20.0);
    let p80 = percentile(values, 80.0);
    emitter.push(&format!("{prefix}_mean"), mean(values));
    emitter.push(&format!("{prefix}_std"), std_pop(values));
    emitter.push(&format!("{prefix}_p20"), p20);
    emitter.push(&format!("{prefix}_p50"), percentile(values, 50.0));
    emitter.push(&format!("{prefix}_p80"), p80);
    emitter.push(
        &format!("{prefix}_range"),
        p20.zip(p80).map(|(a, b)| b - a),
    );
    emitter.push(&format!("{prefix}_rise_slope_mean"), mean(&runs.0));
    emitter.push(&format!("{prefix}_rise_slope_std"), std_pop(&runs.0));
    emitter.push(&format!("{prefix}_fall_slope_mean"), mean(&runs.1));
    emitter.push(&format!("{prefix}_fall_slope_std"), std_pop(&runs.1));
}

/// Collapse the per-frame bundle and cycle sequence into one feature
/// vector aligned to `registry`.
pub fn apply_functionals(
    bundle: &LldBundle,
    periods: &PeriodSequence,
    registry: &FeatureRegistry,
) -> FeatureVector {
    let hop = bundle.hop_seconds;
    let mut emitter = Emitter {
        values: Vec::with_capacity(registry.len()),
        degenerate: Vec::new(),
    };

    let voiced_only = |track: &[f64]| -> Vec<f64> {
        track
            .iter()
            .zip(&bundle.voiced)
            .filter(|(_, &v)| v)
            .map(|(x, _)| *x)
            .collect()
    };

    // shimmer / jitter: per voiced region, then mean and std over regions
    let shimmer_regions = shimmer_per_region(periods);
    let shimmer_values: Vec<f64> = shimmer_regions.iter().map(|p| p.value).collect();
    let shimmer_degenerate = !shimmer_regions.is_empty() && shimmer_regions.iter().all(|p| p.degenerate);
    let jitter_values = jitter_per_region(periods);

    // log-F0 per voiced region, for slope runs that never straddle gaps
    let log_f0_voiced: Vec<f64> = bundle
        .f0
        .iter()
        .zip(&bundle.voiced)
        .filter(|(&f, &v)| v && f > 0.0)
        .map(|(f, _)| f.ln())
        .collect();
    let mut f0_runs = (Vec::new(), Vec::new());
    {
        let mut t = 0usize;
        while t < bundle.voiced.len() {
            if !bundle.voiced[t] {
                t += 1;
                continue;
            }
            let start = t;
            while t < bundle.voiced.len() && bundle.voiced[t] {
                t += 1;
            }
            let region: Vec<f64> = bundle.f0[start..t].iter().map(|f| f.max(1e-6).ln()).collect();
            let (mut r, mut f) = monotone_run_slopes(&region, hop);
            f0_runs.0.append(&mut r);
            f0_runs.1.append(&mut f);
        }
    }

    let intensity_runs = monotone_run_slopes(&bundle.intensity, hop);
    let vstats = voiced_region_stats(&bundle.voiced, hop);

    emitter.push("shimmer_mean", if shimmer_degenerate { None } else { mean(&shimmer_values) });
    emitter.push("shimmer_std", if shimmer_degenerate { None } else { std_pop(&shimmer_values) });
    ten_functionals(&mut emitter, "f0", &log_f0_voiced, &f0_runs);
    emitter.push("jitter_mean", mean(&jitter_values));
    emitter.push("jitter_std", std_pop(&jitter_values));
    ten_functionals(&mut emitter, "intensity", &bundle.intensity, &intensity_runs);
    emitter.push("flux_mean", mean(&bundle.spectral_flux));
    emitter.push("flux_std", std_pop(&bundle.spectral_flux));
    emitter.push("mvd", Some(vstats.mean_voiced_len));
    emitter.push("mvl", Some(vstats.mean_voiceless_len));
    emitter.push("rlp", Some(bundle.loudness_peak_rate));
    emitter.push("cvd", Some(vstats.voiced_regions_per_second));

    if registry.group_size(FeatureGroup::Extended) > 0 {
        let ext = &bundle.extended;
        let push_pair = |name: &str, values: &[f64], emitter: &mut Emitter| {
            emitter.push(&format!("{name}_mean"), mean(values));
            emitter.push(&format!("{name}_std"), std_pop(values));
        };
        for i in 0..4 {
            push_pair(&format!("mfcc{}", i + 1), &ext.mfcc[i], &mut emitter);
        }
        for i in 0..3 {
            // formant statistics over voiced frames only
            push_pair(&format!("f{}_freq", i + 1), &voiced_only(&ext.formant_freq[i]), &mut emitter);
            push_pair(&format!("f{}_bw", i + 1), &voiced_only(&ext.formant_bw[i]), &mut emitter);
            push_pair(&format!("f{}_amp", i + 1), &voiced_only(&ext.formant_amp[i]), &mut emitter);
        }
        push_pair("hnr", &voiced_only(&ext.hnr), &mut emitter);
        push_pair("alpha_ratio", &ext.alpha_ratio, &mut emitter);
        push_pair("hammarberg", &ext.hammarberg, &mut emitter);
        push_pair("slope0_500", &ext.slope_0_500, &mut emitter);
        push_pair("slope500_1500", &ext.slope_500_1500, &mut emitter);
    }

    debug_assert_eq!(emitter.values.len(), registry.len());
    FeatureVector {
        values: emitter.values,
        degenerate: emitter.degenerate,
    }
}
