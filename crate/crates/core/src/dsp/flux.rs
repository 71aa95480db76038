//! Spectral flux between consecutive frames.

/// Euclidean distance between consecutive L2-normalized magnitude
/// spectra. The first frame's flux is 0 by definition; silent spectra
/// normalize to the zero vector.
pub fn spectral_flux(spectra: &[Vec<f64>]) -> Vec<f64> {
    let normalized: Vec<Vec<f64>> = spectra
        .iter()
        .map(|spec| {
            let norm = spec.iter().map(|m| m * m).sum::<f64>().sqrt();
            if norm > 1e-300 {
                spec.iter().map(|m| m / norm).collect()
            } else {
                vec![0.0; spec.len()]
            }
        })
        .collect();
    let mut flux = Vec::with_capacity(spectra.len());
    for t in 0..normalized.len() {
        if t == 0 {
            flux.push(0.0);
        } else {
            let d = normalized[t]
                .iter()
                .zip(&normalized[t - 1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            flux.push(d);
        }
    }
    flux
}
