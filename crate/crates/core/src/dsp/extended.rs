//! Extended low-level descriptors: MFCC 1-4, three LPC formants with
//! bandwidth and relative amplitude, HNR, alpha ratio, Hammarberg index,
//! and two spectral slopes.

use super::fft::bin_frequency;

/// Numeric floor for log arguments.
const LOG_EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ExtendedTracks {
    pub mfcc: [Vec<f64>; 4],
    pub formant_freq: [Vec<f64>; 3],
    pub formant_bw: [Vec<f64>; 3],
    /// Spectrum level at the formant frequency relative to the frame's
    /// spectral maximum, in dB (non-positive).
    pub formant_amp: [Vec<f64>; 3],
    pub hnr: Vec<f64>,
    pub alpha_ratio: Vec<f64>,
    pub hammarberg: Vec<f64>,
    pub slope_0_500: Vec<f64>,
    pub slope_500_1500: Vec<f64>,
}

impl ExtendedTracks {
    pub fn len(&self) -> usize {
        self.hnr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hnr.is_empty()
    }
}

/// Compute the extended tracks.
///
/// * `raw_frames` — unwindowed frames (LPC input).
/// * `spectra` — magnitude spectra of the matching windowed frames.
/// * `strength` — per-frame normalized autocorrelation from the pitch
///   stage, already aligned to the same frame count.
pub fn extended_llds(
    raw_frames: &[Vec<f64>],
    spectra: &[Vec<f64>],
    strength: &[f64],
    sample_rate: u32,
    fft_len: usize,
) -> ExtendedTracks {
    assert_eq!(raw_frames.len(), spectra.len());
    assert_eq!(raw_frames.len(), strength.len());
    let n = raw_frames.len();
    let sr = sample_rate as f64;
    let nyquist = sr / 2.0;

    let mel_bank = MelFilterbank::new(26, fft_len, sample_rate);
    let lpc_order = (2.0 + sr / 1000.0).round() as usize;

    let mut out = ExtendedTracks {
        mfcc: Default::default(),
        formant_freq: Default::default(),
        formant_bw: Default::default(),
        formant_amp: Default::default(),
        hnr: Vec::with_capacity(n),
        alpha_ratio: Vec::with_capacity(n),
        hammarberg: Vec::with_capacity(n),
        slope_0_500: Vec::with_capacity(n),
        slope_500_1500: Vec::with_capacity(n),
    };

    for t in 0..n {
        let spec = &spectra[t];

        let coeffs = mel_bank.mfcc(spec, 4);
        for (i, c) in coeffs.iter().enumerate() {
            out.mfcc[i].push(*c);
        }

        let formants = lpc_formants(&raw_frames[t], lpc_order, sr);
        let max_level = spec
            .iter()
            .fold(LOG_EPS, |m: f64, &v| m.max(v));
        for i in 0..3 {
            match formants.get(i) {
                Some(&(freq, bw)) => {
                    let bin = ((freq * fft_len as f64 / sr).round() as usize).min(spec.len() - 1);
                    let rel = 20.0 * ((spec[bin].max(LOG_EPS)) / max_level).log10();
                    out.formant_freq[i].push(freq);
                    out.formant_bw[i].push(bw);
                    out.formant_amp[i].push(rel);
                }
                None => {
                    out.formant_freq[i].push(0.0);
                    out.formant_bw[i].push(0.0);
                    out.formant_amp[i].push(0.0);
                }
            }
        }

        out.hnr.push(hnr_from_strength(strength[t]));

        let power = |lo: f64, hi: f64| -> f64 {
            let hi = hi.min(nyquist);
            let mut e = 0.0;
            for (k, &m) in spec.iter().enumerate() {
                let f = bin_frequency(k, fft_len, sample_rate);
                if f >= lo && f < hi {
                    e += m * m;
                }
            }
            e
        };
        out.alpha_ratio
            .push(10.0 * ((power(50.0, 1000.0) + LOG_EPS) / (power(1000.0, 5000.0) + LOG_EPS)).log10());

        let band_max_level = |lo: f64, hi: f64| -> f64 {
            let hi = hi.min(nyquist);
            let mut best = f64::NEG_INFINITY;
            for (k, &m) in spec.iter().enumerate() {
                let f = bin_frequency(k, fft_len, sample_rate);
                if f >= lo && f < hi {
                    best = best.max(20.0 * (m.max(LOG_EPS)).log10());
                }
            }
            if best.is_finite() {
                best
            } else {
                20.0 * LOG_EPS.log10()
            }
        };
        out.hammarberg
            .push(band_max_level(0.0, 2000.0) - band_max_level(2000.0, 5000.0));

        out.slope_0_500
            .push(spectral_slope(spec, fft_len, sample_rate, 0.0, 500.0));
        out.slope_500_1500
            .push(spectral_slope(spec, fft_len, sample_rate, 500.0, 1500.0));
    }

    out
}

/// Harmonics-to-noise ratio from the normalized autocorrelation peak,
/// clamped to [-100, 100] dB.
pub fn hnr_from_strength(r: f64) -> f64 {
    let r = r.clamp(1e-10, 1.0 - 1e-10);
    (10.0 * (r / (1.0 - r)).log10()).clamp(-100.0, 100.0)
}

/// Regression slope of the dB spectrum against frequency in Hz over
/// `[lo, hi)`, in dB/Hz.
fn spectral_slope(spec: &[f64], fft_len: usize, sample_rate: u32, lo: f64, hi: f64) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, &m) in spec.iter().enumerate() {
        let f = bin_frequency(k, fft_len, sample_rate);
        if f >= lo && f < hi {
            xs.push(f);
            ys.push(20.0 * (m.max(LOG_EPS)).log10());
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    if var > 0.0 {
        cov / var
    } else {
        0.0
    }
}

// --- mel cepstrum ---

struct MelFilterbank {
    /// Per filter: (bin, weight) pairs.
    filters: Vec<Vec<(usize, f64)>>,
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

impl MelFilterbank {
    fn new(n_filters: usize, fft_len: usize, sample_rate: u32) -> Self {
        let nyquist = sample_rate as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist);
        let points: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_filters + 1) as f64))
            .collect();
        let half = fft_len / 2 + 1;
        let mut filters = Vec::with_capacity(n_filters);
        for m in 0..n_filters {
            let (lo, mid, hi) = (points[m], points[m + 1], points[m + 2]);
            let mut taps = Vec::new();
            for k in 0..half {
                let f = bin_frequency(k, fft_len, sample_rate);
                let w = if f >= lo && f <= mid && mid > lo {
                    (f - lo) / (mid - lo)
                } else if f > mid && f <= hi && hi > mid {
                    (hi - f) / (hi - mid)
                } else {
                    0.0
                };
                if w > 0.0 {
                    taps.push((k, w));
                }
            }
            filters.push(taps);
        }
        MelFilterbank { filters }
    }

    /// Log mel energies of a magnitude spectrum followed by a DCT-II,
    /// returning cepstral coefficients 1..=n (the 0th is dropped).
    fn mfcc(&self, spec: &[f64], n: usize) -> Vec<f64> {
        let m_count = self.filters.len();
        let log_energies: Vec<f64> = self
            .filters
            .iter()
            .map(|taps| {
                let e: f64 = taps.iter().map(|&(k, w)| w * spec[k] * spec[k]).sum();
                (e.max(LOG_EPS)).ln()
            })
            .collect();
        let scale = (2.0 / m_count as f64).sqrt();
        (1..=n)
            .map(|c| {
                scale
                    * log_energies
                        .iter()
                        .enumerate()
                        .map(|(m, &le)| {
                            le * (std::f64::consts::PI * c as f64 * (m as f64 + 0.5)
                                / m_count as f64)
                                .cos()
                        })
                        .sum::<f64>()
            })
            .collect()
    }
}

// --- LPC formants ---

/// Formant candidates (frequency Hz, bandwidth Hz) from LPC root
/// finding, sorted by frequency, at most three returned.
fn lpc_formants(frame: &[f64], order: usize, sr: f64) -> Vec<(f64, f64)> {
    if frame.len() <= order + 1 {
        return Vec::new();
    }
    // pre-emphasis then Hann window
    let mut x: Vec<f64> = Vec::with_capacity(frame.len());
    x.push(frame[0]);
    for i in 1..frame.len() {
        x.push(frame[i] - 0.97 * frame[i - 1]);
    }
    let n = x.len();
    for (i, v) in x.iter_mut().enumerate() {
        *v *= 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos();
    }

    let mut autocorr = vec![0.0f64; order + 1];
    for (lag, r) in autocorr.iter_mut().enumerate() {
        *r = x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
    }
    if autocorr[0] <= 1e-300 {
        return Vec::new();
    }

    let Some(a) = levinson(&autocorr, order) else {
        return Vec::new();
    };

    // roots of z^p - a1 z^(p-1) - ... - ap
    let mut poly = vec![0.0; order + 1];
    poly[order] = 1.0;
    for (i, &ai) in a.iter().enumerate() {
        poly[order - 1 - i] = -ai;
    }
    let roots = durand_kerner(&poly);

    let mut formants: Vec<(f64, f64)> = roots
        .iter()
        .filter(|z| z.1 > 0.0)
        .filter_map(|&(re, im)| {
            let radius = (re * re + im * im).sqrt();
            if radius >= 1.0 || radius <= 0.0 {
                return None;
            }
            let freq = im.atan2(re) * sr / (2.0 * std::f64::consts::PI);
            let bw = -radius.ln() * sr / std::f64::consts::PI;
            if freq < 50.0 || freq > sr / 2.0 - 50.0 {
                return None;
            }
            // broad roots model spectral tilt, not resonances
            if bw > 600.0 {
                return None;
            }
            Some((freq, bw))
        })
        .collect();
    formants.sort_by(|a, b| a.0.total_cmp(&b.0));
    formants.truncate(3);
    formants
}

/// Levinson-Durbin recursion; returns predictor coefficients `a[1..=p]`
/// for `x[n] ~ sum a_k x[n-k]`, or `None` on numerical breakdown.
fn levinson(r: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut a = vec![0.0f64; p + 1];
    let mut err = r[0];
    for i in 1..=p {
        let mut acc = r[i];
        for j in 1..i {
            acc -= a[j] * r[i - j];
        }
        if err.abs() < 1e-300 {
            return None;
        }
        let k = acc / err;
        let prev = a.clone();
        a[i] = k;
        for j in 1..i {
            a[j] = prev[j] - k * prev[i - j];
        }
        err *= 1.0 - k * k;
        if !err.is_finite() {
            return None;
        }
    }
    Some(a[1..].to_vec())
}

/// Durand-Kerner simultaneous root iteration for a real polynomial with
/// ascending coefficients (`coeffs[i]` multiplies `z^i`). Deterministic
/// start points; good enough for the LPC orders used here.
fn durand_kerner(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for &c in monic.iter().rev() {
            acc = (acc.0 * z.0 - acc.1 * z.1 + c, acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };

    let mut roots: Vec<(f64, f64)> = (0..degree)
        .map(|k| {
            // (0.4 + 0.9i)^(k+1)
            let mut z = (1.0, 0.0);
            for _ in 0..=k {
                z = (z.0 * 0.4 - z.1 * 0.9, z.0 * 0.9 + z.1 * 0.4);
            }
            z
        })
        .collect();

    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let p = eval(zi);
            let mut denom = (1.0f64, 0.0f64);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let d = (zi.0 - zj.0, zi.1 - zj.1);
                    denom = (denom.0 * d.0 - denom.1 * d.1, denom.0 * d.1 + denom.1 * d.0);
                }
            }
            let dn = denom.0 * denom.0 + denom.1 * denom.1;
            if dn < 1e-300 {
                continue;
            }
            let q = (
                (p.0 * denom.0 + p.1 * denom.1) / dn,
                (p.1 * denom.0 - p.0 * denom.1) / dn,
            );
            roots[i] = (zi.0 - q.0, zi.1 - q.1);
            max_step = max_step.max((q.0 * q.0 + q.1 * q.1).sqrt());
        }
        if max_step < 1e-12 {
            break;
        }
    }
    roots
}
