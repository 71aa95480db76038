//! Voiced/voiceless run statistics.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoicedStats {
    /// Mean voiced-run length in seconds (0 when no voiced run exists).
    pub mean_voiced_len: f64,
    /// Mean voiceless-run length in seconds.
    pub mean_voiceless_len: f64,
    /// Continuous voiced regions per second of track.
    pub voiced_regions_per_second: f64,
}

/// Summarize maximal runs of the voicing mask. Track duration is
/// measured as `len * hop`.
pub fn voiced_region_stats(voiced: &[bool], hop_seconds: f64) -> VoicedStats {
    let mut voiced_runs: Vec<usize> = Vec::new();
    let mut voiceless_runs: Vec<usize> = Vec::new();
    let mut i = 0usize;
    while i < voiced.len() {
        let state = voiced[i];
        let start = i;
        while i < voiced.len() && voiced[i] == state {
            i += 1;
        }
        if state {
            voiced_runs.push(i - start);
        } else {
            voiceless_runs.push(i - start);
        }
    }
    let mean_len = |runs: &[usize]| -> f64 {
        if runs.is_empty() {
            0.0
        } else {
            runs.iter().sum::<usize>() as f64 * hop_seconds / runs.len() as f64
        }
    };
    let duration = voiced.len() as f64 * hop_seconds;
    VoicedStats {
        mean_voiced_len: mean_len(&voiced_runs),
        mean_voiceless_len: mean_len(&voiceless_runs),
        voiced_regions_per_second: if duration > 0.0 {
            voiced_runs.len() as f64 / duration
        } else {
            0.0
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_voiced_half_voiceless() {
        // 0.5 s voiced then 0.5 s unvoiced at 10 ms hop
        let mut mask = vec![true; 50];
        mask.extend(vec![false; 50]);
        let stats = voiced_region_stats(&mask, 0.01);
        assert!((stats.mean_voiced_len - 0.5).abs() < 1e-12);
        assert!((stats.mean_voiceless_len - 0.5).abs() < 1e-12);
        assert!((stats.voiced_regions_per_second - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_voiced() {
        let mask = vec![true; 200];
        let stats = voiced_region_stats(&mask, 0.01);
        assert_eq!(stats.mean_voiceless_len, 0.0);
        assert!((stats.voiced_regions_per_second - 1.0 / 2.0).abs() < 1e-12);
        assert!((stats.mean_voiced_len - 2.0).abs() < 1e-12);
    }

    #[test]
    fn all_unvoiced() {
        let mask = vec![false; 100];
        let stats = voiced_region_stats(&mask, 0.01);
        assert_eq!(stats.mean_voiced_len, 0.0);
        assert_eq!(stats.voiced_regions_per_second, 0.0);
    }

    #[test]
    fn empty_track() {
        let stats = voiced_region_stats(&[], 0.01);
        assert_eq!(stats.mean_voiced_len, 0.0);
        assert_eq!(stats.mean_voiceless_len, 0.0);
        assert_eq!(stats.voiced_regions_per_second, 0.0);
    }

    #[test]
    fn alternating_runs_counted_individually() {
        let mask = [true, true, false, true, false, false, true, true, true, false];
        let stats = voiced_region_stats(&mask, 0.01);
        // voiced runs: 2,1,3 -> mean 2.0 frames = 0.02 s
        assert!((stats.mean_voiced_len - 0.02).abs() < 1e-12);
        // voiceless runs: 1,2,1 -> mean 4/3 frames
        assert!((stats.mean_voiceless_len - 0.04 / 3.0).abs() < 1e-12);
        assert!((stats.voiced_regions_per_second - 3.0 / 0.1).abs() < 1e-12);
    }
}
