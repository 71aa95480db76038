//! RIFF/WAVE reader and writer.
//!
//! Supports the two encodings found in the corpus: integer PCM16
//! (format code 1) and IEEE float32 (format code 3), mono or stereo.
//! Stereo is mixed down to mono by arithmetic mean of the channels.

use thiserror::Error;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

/// Mono audio with samples normalized to [-1.0, 1.0].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    /// Channel count of the source file (the clip itself is mono).
    channel_count: u16,
}

impl AudioClip {
    /// Build a clip from already-normalized mono samples.
    ///
    /// Panics if `sample_rate` is zero; callers own that validation.
    pub fn from_samples(samples: Vec<f64>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        AudioClip {
            samples,
            sample_rate,
            channel_count: 1,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_count(&self) -> u16 {
        self.channel_count
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Slice by time. The start index is floored and the end index is
    /// ceiled to sample resolution, then clamped to the clip length.
    pub fn slice_seconds(&self, start: f64, end: f64) -> AudioClip {
        let sr = self.sample_rate as f64;
        let a = (start * sr).floor().max(0.0) as usize;
        let b = ((end * sr).ceil() as usize).min(self.samples.len());
        AudioClip {
            samples: self.samples[a.min(b)..b].to_vec(),
            sample_rate: self.sample_rate,
            channel_count: self.channel_count,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WavError {
    #[error("malformed WAV container: {0}")]
    MalformedContainer(String),
    #[error("unsupported WAV encoding: format code {format}, {bits} bits per sample")]
    UnsupportedEncoding { format: u16, bits: u16 },
    #[error("WAV data chunk holds no samples")]
    ZeroSamples,
}

fn chunk_err(msg: &str) -> WavError {
    WavError::MalformedContainer(msg.to_string())
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16, WavError> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| chunk_err("truncated chunk"))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, WavError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| chunk_err("truncated chunk"))
}

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

/// Parse a RIFF/WAVE byte stream into a mono, normalized [`AudioClip`].
///
/// PCM16 samples map to `value / 32768` (so -32768 becomes exactly -1.0);
/// float32 samples are clamped into [-1, 1]. Stereo input is averaged.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioClip, WavError> {
    if bytes.len() < 12 {
        return Err(chunk_err("file shorter than RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(chunk_err("missing RIFF magic"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(chunk_err("missing WAVE form type"));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4)? as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| chunk_err("chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(chunk_err("chunk extends past end of file"));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(chunk_err("fmt chunk shorter than 16 bytes"));
                }
                fmt = Some(FmtChunk {
                    format: read_u16(body, 0)?,
                    channels: read_u16(body, 2)?,
                    sample_rate: read_u32(body, 4)?,
                    bits_per_sample: read_u16(body, 14)?,
                });
            }
            b"data" => {
                data = Some(body);
            }
            _ => {} // LIST, fact, cue, ... are skipped
        }
        // chunks are word-aligned
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| chunk_err("no fmt chunk"))?;
    let data = data.ok_or_else(|| chunk_err("no data chunk"))?;

    if fmt.sample_rate == 0 {
        return Err(chunk_err("sample rate is zero"));
    }
    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(chunk_err("only mono and stereo are supported"));
    }
    let interleaved: Vec<f64> = match (fmt.format, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => data
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
            .collect(),
        (FORMAT_IEEE_FLOAT, 32) => data
            .chunks_exact(4)
            .map(|b| (f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64).clamp(-1.0, 1.0))
            .collect(),
        (format, bits) => return Err(WavError::UnsupportedEncoding { format, bits }),
    };

    let samples = if fmt.channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|p| 0.5 * (p[0] + p[1]))
            .collect()
    } else {
        interleaved
    };
    if samples.is_empty() {
        return Err(WavError::ZeroSamples);
    }

    Ok(AudioClip {
        samples,
        sample_rate: fmt.sample_rate,
        channel_count: fmt.channels,
    })
}

fn container(fmt_body: &[u8], data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 + fmt_body.len() + 8 + data.len());
    out.extend_from_slice(b"RIFF");
    let riff_size = 4 + 8 + fmt_body.len() + 8 + data.len();
    out.extend_from_slice(&(riff_size as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&(fmt_body.len() as u32).to_le_bytes());
    out.extend_from_slice(fmt_body);
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(data);
    out
}

fn fmt_body(format: u16, sample_rate: u32, bits: u16) -> Vec<u8> {
    let block_align = bits / 8; // mono
    let byte_rate = sample_rate * block_align as u32;
    let mut body = Vec::with_capacity(16);
    body.extend_from_slice(&format.to_le_bytes());
    body.extend_from_slice(&1u16.to_le_bytes());
    body.extend_from_slice(&sample_rate.to_le_bytes());
    body.extend_from_slice(&byte_rate.to_le_bytes());
    body.extend_from_slice(&block_align.to_le_bytes());
    body.extend_from_slice(&bits.to_le_bytes());
    body
}

/// Serialize a mono clip as PCM16. Values are scaled by 32768 and
/// clamped to the i16 range, inverting the reader's normalization.
pub fn write_wav_pcm16(clip: &AudioClip) -> Vec<u8> {
    let mut data = Vec::with_capacity(clip.samples.len() * 2);
    for &s in &clip.samples {
        let v = (s * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        data.extend_from_slice(&v.to_le_bytes());
    }
    container(&fmt_body(FORMAT_PCM, clip.sample_rate, 16), &data)
}

/// Serialize a mono clip as IEEE float32.
pub fn write_wav_float32(clip: &AudioClip) -> Vec<u8> {
    let mut data = Vec::with_capacity(clip.samples.len() * 4);
    for &s in &clip.samples {
        data.extend_from_slice(&(s as f32).to_le_bytes());
    }
    container(&fmt_body(FORMAT_IEEE_FLOAT, clip.sample_rate, 32), &data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm16_file(samples: &[i16], sample_rate: u32, channels: u16) -> Vec<u8> {
        let mut data = Vec::new();
        for s in samples {
            data.extend_from_slice(&s.to_le_bytes());
        }
        let mut body = fmt_body(FORMAT_PCM, sample_rate, 16);
        body[2..4].copy_from_slice(&channels.to_le_bytes());
        container(&body, &data)
    }

    #[test]
    fn silence_parses_to_one_second_of_zeros() {
        let bytes = pcm16_file(&vec![0i16; 16000], 16000, 1);
        let clip = parse_wav(&bytes).unwrap();
        assert_eq!(clip.sample_rate(), 16000);
        assert_eq!(clip.samples().len(), 16000);
        assert!((clip.duration_seconds() - 1.0).abs() < 1e-12);
        assert!(clip.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn pcm16_extremes_normalize_by_integer_scaling() {
        let bytes = pcm16_file(&[i16::MIN, i16::MAX], 8000, 1);
        let clip = parse_wav(&bytes).unwrap();
        assert_eq!(clip.samples()[0], -1.0);
        assert_eq!(clip.samples()[1], 32767.0 / 32768.0);
    }

    #[test]
    fn bad_magic_is_malformed() {
        let mut bytes = pcm16_file(&[0, 0], 8000, 1);
        bytes[0..4].copy_from_slice(b"RIFX");
        assert!(matches!(
            parse_wav(&bytes),
            Err(WavError::MalformedContainer(_))
        ));
    }

    #[test]
    fn truncated_data_chunk_is_malformed() {
        let mut bytes = pcm16_file(&[1, 2, 3, 4], 8000, 1);
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(
            parse_wav(&bytes),
            Err(WavError::MalformedContainer(_))
        ));
    }

    #[test]
    fn unsupported_compression_code_rejected() {
        let mut bytes = pcm16_file(&[0, 0], 8000, 1);
        // format code lives at offset 20 (fmt body start)
        bytes[20..22].copy_from_slice(&6u16.to_le_bytes()); // A-law
        assert_eq!(
            parse_wav(&bytes),
            Err(WavError::UnsupportedEncoding {
                format: 6,
                bits: 16
            })
        );
    }

    #[test]
    fn empty_data_chunk_is_zero_samples() {
        let bytes = pcm16_file(&[], 8000, 1);
        assert_eq!(parse_wav(&bytes), Err(WavError::ZeroSamples));
    }

    #[test]
    fn stereo_mixes_down_to_channel_mean() {
        let bytes = pcm16_file(&[16384, -16384, 8192, 8192], 8000, 2);
        let clip = parse_wav(&bytes).unwrap();
        assert_eq!(clip.channel_count(), 2);
        assert_eq!(clip.samples().len(), 2);
        assert!((clip.samples()[0] - 0.0).abs() < 1e-12);
        assert!((clip.samples()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pcm16_round_trip_is_sample_exact() {
        let orig: Vec<i16> = (-40..40).map(|i| i * 801).collect();
        let clip = parse_wav(&pcm16_file(&orig, 16000, 1)).unwrap();
        let again = parse_wav(&write_wav_pcm16(&clip)).unwrap();
        assert_eq!(clip.samples(), again.samples());
    }

    #[test]
    fn float32_round_trip_is_sample_exact() {
        let samples: Vec<f64> = (0..64).map(|i| ((i as f64) * 0.37).sin() as f32 as f64).collect();
        let clip = AudioClip::from_samples(samples, 22050);
        let again = parse_wav(&write_wav_float32(&clip)).unwrap();
        assert_eq!(clip.samples(), again.samples());
    }
}
