//! Corpus ingestion: WAV audio, Praat TextGrid annotations, and the
//! two-tier labeling scheme that turns them into class-labeled segments.

mod labels;
mod manifest;
mod segment;
mod textgrid;
mod wav;

pub use labels::{map_label, AggressionLabel, CoarseClass, LabelError, TurnLabel};
pub use manifest::{parse_manifest, Language, LanguageFilter, ManifestEntry, ManifestError};
pub use segment::{
    extract_segments, Segment, SegmentConfig, SegmentError, SegmentExtraction, TurnAnnotation,
};
pub use textgrid::{
    decode_text, parse_textgrid, serialize_textgrid, Interval, IntervalTier, TextGridError,
};
pub use wav::{parse_wav, write_wav_float32, write_wav_pcm16, AudioClip, WavError};
