//! Short-time framing.

use serde::{Deserialize, Serialize};

use super::DspError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowFunction {
    Hann,
    Hamming,
    Rect,
}

impl WindowFunction {
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        match self {
            WindowFunction::Rect => vec![1.0; len],
            WindowFunction::Hann => (0..len)
                .map(|n| {
                    0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()
                })
                .collect(),
            WindowFunction::Hamming => (0..len)
                .map(|n| {
                    0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Analysis window length in seconds.
    pub window_length: f64,
    /// Hop between frame starts in seconds.
    pub hop_length: f64,
    pub window: WindowFunction,
    /// FFT length; `None` selects the next power of two at or above the
    /// window length.
    pub fft_size: Option<usize>,
}

impl FrameConfig {
    /// 25 ms Hann window, 10 ms hop: the default for spectral tracks.
    pub fn spectral() -> Self {
        FrameConfig {
            window_length: 0.025,
            hop_length: 0.010,
            window: WindowFunction::Hann,
            fft_size: None,
        }
    }

    /// Same geometry with a rectangular window, for energy tracks.
    pub fn energy() -> Self {
        FrameConfig {
            window: WindowFunction::Rect,
            ..Self::spectral()
        }
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (self.window_length * sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ((self.hop_length * sample_rate as f64).round() as usize).max(1)
    }

    pub fn fft_len(&self, sample_rate: u32) -> usize {
        let w = self.window_samples(sample_rate);
        match self.fft_size {
            Some(n) => n.max(w.next_power_of_two()),
            None => w.next_power_of_two(),
        }
    }
}

/// Number of frames for `n` samples with window `w` and hop `h`.
pub fn frame_count(n: usize, w: usize, h: usize) -> usize {
    if n < w {
        0
    } else {
        (n - w) / h + 1
    }
}

/// Cut the signal into windowed frames. Frame `t` covers samples
/// `[t*hop, t*hop + window)`; trailing samples short of a full window
/// are dropped.
pub fn frame_signal(
    samples: &[f64],
    sample_rate: u32,
    cfg: &FrameConfig,
) -> Result<Vec<Vec<f64>>, DspError> {
    let w = cfg.window_samples(sample_rate);
    let h = cfg.hop_samples(sample_rate);
    if w == 0 || samples.len() < w {
        return Err(DspError::TooShort {
            samples: samples.len(),
            window: w,
        });
    }
    let coeffs = cfg.window.coefficients(w);
    let count = frame_count(samples.len(), w, h);
    let mut frames = Vec::with_capacity(count);
    for t in 0..count {
        let start = t * h;
        let frame: Vec<f64> = samples[start..start + w]
            .iter()
            .zip(&coeffs)
            .map(|(s, c)| s * c)
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_second_at_16k_with_25ms_10ms_gives_98_frames() {
        let samples = vec![0.0; 16000];
        let frames = frame_signal(&samples, 16000, &FrameConfig::spectral()).unwrap();
        assert_eq!(frames.len(), 98); // floor((16000-400)/160)+1
        assert_eq!(frames[0].len(), 400);
    }

    #[test]
    fn shorter_than_one_window_errors() {
        let samples = vec![0.0; 300];
        assert!(matches!(
            frame_signal(&samples, 16000, &FrameConfig::spectral()),
            Err(DspError::TooShort { .. })
        ));
    }

    #[test]
    fn rect_window_is_identity_on_ones() {
        let samples = vec![1.0; 800];
        let frames = frame_signal(&samples, 16000, &FrameConfig::energy()).unwrap();
        for frame in &frames {
            assert!(frame.iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn fft_len_is_next_power_of_two() {
        let cfg = FrameConfig::spectral();
        assert_eq!(cfg.fft_len(16000), 512); // window 400
        assert_eq!(cfg.fft_len(8000), 256); // window 200
    }
}
