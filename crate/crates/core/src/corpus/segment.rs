//! Segment extraction: apply the Tier-1 label mapping to a parsed
//! TextGrid and slice the audio accordingly.

use thiserror::Error;

use super::labels::{map_label, AggressionLabel, CoarseClass, TurnLabel};
use super::textgrid::IntervalTier;
use super::wav::AudioClip;

#[derive(Debug, Clone)]
pub struct SegmentConfig {
    /// Name of the Tier-1 interval tier.
    pub aggression_tier: String,
    /// Name of the Tier-2 interval tier (optional in the file).
    pub turn_tier: String,
    /// Segments shorter than this are logged and skipped.
    pub min_duration: f64,
    /// How far the tier may extend past the audio before it is an error.
    pub duration_tolerance: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            aggression_tier: "Aggression".to_string(),
            turn_tier: "Turn taking".to_string(),
            min_duration: 0.2,
            duration_tolerance: 0.05,
        }
    }
}

/// One class-labeled slice of a source clip.
#[derive(Debug, Clone)]
pub struct Segment {
    /// Identifier of the source file this segment was cut from.
    pub clip_ref: String,
    pub start: f64,
    pub end: f64,
    pub fine_label: AggressionLabel,
    pub coarse_class: CoarseClass,
    pub audio: AudioClip,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Tier-2 annotation carried through as metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnAnnotation {
    pub start: f64,
    pub end: f64,
    pub label: TurnLabel,
}

#[derive(Debug, Clone)]
pub struct SegmentExtraction {
    pub segments: Vec<Segment>,
    /// Intervals whose label maps to a class but whose duration fell
    /// below the configured minimum.
    pub skipped_short: usize,
    pub turn_annotations: Vec<TurnAnnotation>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("no tier named {0:?} in TextGrid")]
    MissingTier(String),
    #[error("unknown label {label:?} in tier {tier:?} (interval {index})")]
    UnknownLabel {
        tier: String,
        index: usize,
        label: String,
    },
    #[error(
        "tier {tier:?} extends to {tier_xmax} s but the audio is only {clip_duration} s long"
    )]
    DurationMismatch { tier: String, tier_xmax: f64, clip_duration: f64 },
}

/// Produce one [`Segment`] per Tier-1 interval whose label maps onto a
/// class and whose duration clears the minimum. `IRR` and empty labels
/// are dropped; unknown labels are errors.
pub fn extract_segments(
    clip: &AudioClip,
    clip_ref: &str,
    tiers: &[IntervalTier],
    config: &SegmentConfig,
) -> Result<SegmentExtraction, SegmentError> {
    let tier = tiers
        .iter()
        .find(|t| t.name == config.aggression_tier)
        .ok_or_else(|| SegmentError::MissingTier(config.aggression_tier.clone()))?;

    let clip_duration = clip.duration_seconds();
    if tier.xmax > clip_duration + config.duration_tolerance {
        return Err(SegmentError::DurationMismatch {
            tier: tier.name.clone(),
            tier_xmax: tier.xmax,
            clip_duration,
        });
    }

    let mut segments = Vec::new();
    let mut skipped_short = 0usize;
    for (index, iv) in tier.intervals.iter().enumerate() {
        let fine = AggressionLabel::parse(&iv.label).map_err(|_| SegmentError::UnknownLabel {
            tier: tier.name.clone(),
            index: index + 1,
            label: iv.label.clone(),
        })?;
        let Some(coarse) = map_label(fine) else {
            continue;
        };
        let duration = iv.xmax - iv.xmin;
        if duration < config.min_duration {
            log::warn!(
                "{clip_ref}: skipping {:.3}s {} segment at {:.3}s (below minimum {:.3}s)",
                duration,
                fine.as_str(),
                iv.xmin,
                config.min_duration
            );
            skipped_short += 1;
            continue;
        }
        segments.push(Segment {
            clip_ref: clip_ref.to_string(),
            start: iv.xmin,
            end: iv.xmax,
            fine_label: fine,
            coarse_class: coarse,
            audio: clip.slice_seconds(iv.xmin, iv.xmax),
        });
    }

    let mut turn_annotations = Vec::new();
    if let Some(turns) = tiers.iter().find(|t| t.name == config.turn_tier) {
        for (index, iv) in turns.intervals.iter().enumerate() {
            if iv.label.trim().is_empty() {
                continue;
            }
            let label = TurnLabel::parse(&iv.label).map_err(|_| SegmentError::UnknownLabel {
                tier: turns.name.clone(),
                index: index + 1,
                label: iv.label.clone(),
            })?;
            turn_annotations.push(TurnAnnotation {
                start: iv.xmin,
                end: iv.xmax,
                label,
            });
        }
    }

    Ok(SegmentExtraction {
        segments,
        skipped_short,
        turn_annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::textgrid::Interval;

    fn tier(name: &str, intervals: &[(f64, f64, &str)]) -> IntervalTier {
        IntervalTier {
            name: name.to_string(),
            xmin: 0.0,
            xmax: intervals.last().map(|i| i.1).unwrap_or(0.0),
            intervals: intervals
                .iter()
                .map(|(a, b, l)| Interval {
                    xmin: *a,
                    xmax: *b,
                    label: l.to_string(),
                })
                .collect(),
        }
    }

    fn five_second_clip() -> AudioClip {
        AudioClip::from_samples(vec![0.25; 5 * 8000], 8000)
    }

    #[test]
    fn irr_intervals_are_dropped() {
        let tiers = vec![tier(
            "Aggression",
            &[(0.0, 2.0, "OAG_NT"), (2.0, 3.0, "IRR"), (3.0, 5.0, "NAG")],
        )];
        let out = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap();
        assert_eq!(out.segments.len(), 2);
        assert_eq!(out.segments[0].coarse_class, CoarseClass::Oag);
        assert_eq!(out.segments[0].start, 0.0);
        assert_eq!(out.segments[0].end, 2.0);
        assert_eq!(out.segments[1].coarse_class, CoarseClass::Nag);
        assert_eq!(out.segments[1].audio.samples().len(), 2 * 8000);
    }

    #[test]
    fn all_irr_yields_empty_list() {
        let tiers = vec![tier("Aggression", &[(0.0, 2.0, "IRR"), (2.0, 5.0, "")])];
        let out = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap();
        assert!(out.segments.is_empty());
        assert_eq!(out.skipped_short, 0);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let tiers = vec![tier("Aggression", &[(0.0, 2.0, "ANGRY")])];
        let err = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap_err();
        assert!(matches!(err, SegmentError::UnknownLabel { .. }));
    }

    #[test]
    fn missing_tier_is_an_error() {
        let tiers = vec![tier("Other", &[(0.0, 2.0, "NAG")])];
        let err = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap_err();
        assert_eq!(err, SegmentError::MissingTier("Aggression".to_string()));
    }

    #[test]
    fn tier_past_audio_end_is_duration_mismatch() {
        let tiers = vec![tier("Aggression", &[(0.0, 5.2, "NAG")])];
        let err = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap_err();
        assert!(matches!(err, SegmentError::DurationMismatch { .. }));
    }

    #[test]
    fn short_segments_are_skipped_and_counted() {
        let tiers = vec![tier(
            "Aggression",
            &[(0.0, 0.1, "NAG"), (0.1, 2.0, "NAG")],
        )];
        let out = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap();
        assert_eq!(out.segments.len(), 1);
        assert_eq!(out.skipped_short, 1);
    }

    #[test]
    fn turn_tier_is_carried_as_metadata() {
        let tiers = vec![
            tier("Aggression", &[(0.0, 2.0, "NAG")]),
            tier("Turn taking", &[(0.0, 1.5, "TCU"), (1.5, 2.0, "Overlap")]),
        ];
        let out = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap();
        assert_eq!(
            out.turn_annotations,
            vec![
                TurnAnnotation { start: 0.0, end: 1.5, label: TurnLabel::Tcu },
                TurnAnnotation { start: 1.5, end: 2.0, label: TurnLabel::Overlap },
            ]
        );
    }

    #[test]
    fn segment_count_matches_label_rule() {
        // count = intervals with mappable label and duration >= min
        let tiers = vec![tier(
            "Aggression",
            &[
                (0.0, 1.0, "OAG_T"),
                (1.0, 1.05, "CAG_T"),
                (1.05, 2.0, "IRR"),
                (2.0, 3.0, "CAG_NT"),
                (3.0, 5.0, "NAG"),
            ],
        )];
        let out = extract_segments(&five_second_clip(), "clip", &tiers, &SegmentConfig::default())
            .unwrap();
        assert_eq!(out.segments.len(), 3);
        let total: f64 = out.segments.iter().map(|s| s.duration()).sum();
        assert!(total <= five_second_clip().duration_seconds() + 1e-9);
    }
}
