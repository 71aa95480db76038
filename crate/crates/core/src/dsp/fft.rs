//! Magnitude spectra via FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Compute one-sided magnitude spectra (bins `0..=fft_len/2`) for a set
/// of frames, zero-padding each frame to `fft_len`.
pub fn magnitude_spectra(frames: &[Vec<f64>], fft_len: usize) -> Vec<Vec<f64>> {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(fft_len);
    let half = fft_len / 2 + 1;
    frames
        .iter()
        .map(|frame| {
            let mut buf: Vec<Complex<f64>> = frame
                .iter()
                .map(|&x| Complex::new(x, 0.0))
                .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
                .take(fft_len)
                .collect();
            fft.process(&mut buf);
            buf[..half].iter().map(|c| c.norm()).collect()
        })
        .collect()
}

/// Frequency of bin `k` for the given FFT length and sample rate.
pub fn bin_frequency(k: usize, fft_len: usize, sample_rate: u32) -> f64 {
    k as f64 * sample_rate as f64 / fft_len as f64
}
