//! `extract`: corpus manifest -> per-segment feature store.

use rayon::prelude::*;

use aggrospeech::corpus::{
    decode_text, extract_segments, parse_manifest, parse_wav, parse_textgrid, Segment,
};
use aggrospeech::corpus::{Language, ManifestEntry};
use aggrospeech::dsp::extract_features;
use aggrospeech::store::FeatureStore;

use super::{CliError, Context};
use crate::manifest::RunManifest;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let manifest_path = ctx.config.corpus.manifest.clone().ok_or_else(|| {
        CliError::Usage("corpus.manifest is not set (config key or --config)".to_string())
    })?;
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", manifest_path.display())))?;
    let entries = parse_manifest(&manifest_text)
        .map_err(|e| CliError::Data(format!("{}: {e}", manifest_path.display())))?;
    let entries: Vec<ManifestEntry> = entries
        .into_iter()
        .filter(|e| ctx.language.accepts(e.language))
        .collect();

    let registry = ctx
        .config
        .registry()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut store = FeatureStore::new(registry.clone());

    let mut run_manifest = RunManifest::new("extract", &ctx.config.canonical_toml());
    run_manifest.add_input(&manifest_path)?;

    if entries.is_empty() {
        log::warn!("manifest holds no entries after the language filter; writing an empty store");
        store.write_dir(&ctx.out_dir)?;
        run_manifest.write(&ctx.out_dir)?;
        return Ok(());
    }

    // stage 1: parse audio + annotation per file
    let parsed: Vec<Result<(usize, Vec<Segment>, Language), CliError>> = entries
        .par_iter()
        .enumerate()
        .map(|(idx, entry)| parse_entry(ctx, idx, entry))
        .collect();

    let mut segments: Vec<(Segment, Language)> = Vec::new();
    let mut failed_files = 0usize;
    for result in parsed {
        match result {
            Ok((_, segs, language)) => {
                segments.extend(segs.into_iter().map(|s| (s, language)));
            }
            Err(e) => {
                if ctx.continue_on_error {
                    log::error!("{} (skipped)", e.message());
                    failed_files += 1;
                } else {
                    return Err(e);
                }
            }
        }
    }

    for entry in &entries {
        // hash inputs that existed; missing files already errored above
        let _ = run_manifest.add_input(&entry.audio);
        let _ = run_manifest.add_input(&entry.textgrid);
    }

    // stage 2: per-segment feature extraction, order-preserving
    let dsp = ctx.config.dsp_config();
    let vectors: Vec<Result<_, CliError>> = segments
        .par_iter()
        .map(|(segment, _)| {
            extract_features(&segment.audio, &dsp, &registry).map_err(|e| {
                CliError::Numeric(format!(
                    "{} [{:.3}-{:.3}s]: {e}",
                    segment.clip_ref, segment.start, segment.end
                ))
            })
        })
        .collect();

    let mut skipped_segments = 0usize;
    for ((segment, language), vector) in segments.iter().zip(vectors) {
        match vector {
            Ok(v) => {
                let id = format!("{}:{:.3}-{:.3}", segment.clip_ref, segment.start, segment.end);
                store.push(id, *language, segment.coarse_class, v);
            }
            Err(e) => {
                if ctx.continue_on_error {
                    log::error!("{} (segment skipped)", e.message());
                    skipped_segments += 1;
                } else {
                    return Err(e);
                }
            }
        }
    }

    store.write_dir(&ctx.out_dir)?;
    run_manifest.write(&ctx.out_dir)?;
    log::info!(
        "extracted {} feature rows into {} ({} failed files, {} failed segments)",
        store.records.len(),
        ctx.out_dir.display(),
        failed_files,
        skipped_segments
    );
    Ok(())
}

fn parse_entry(
    ctx: &Context,
    idx: usize,
    entry: &ManifestEntry,
) -> Result<(usize, Vec<Segment>, Language), CliError> {
    let audio_bytes = std::fs::read(&entry.audio)
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.audio.display())))?;
    let clip = parse_wav(&audio_bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.audio.display())))?;

    let grid_bytes = std::fs::read(&entry.textgrid)
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.textgrid.display())))?;
    let grid_text = decode_text(&grid_bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.textgrid.display())))?;
    let tiers = parse_textgrid(&grid_text)
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.textgrid.display())))?;

    let clip_ref = entry.audio.display().to_string();
    let extraction = extract_segments(&clip, &clip_ref, &tiers, &ctx.config.segment_config())
        .map_err(|e| CliError::Data(format!("{}: {e}", entry.textgrid.display())))?;
    if extraction.skipped_short > 0 {
        log::info!(
            "{}: skipped {} segments below the minimum duration",
            clip_ref,
            extraction.skipped_short
        );
    }
    Ok((idx, extraction.segments, entry.language))
}
