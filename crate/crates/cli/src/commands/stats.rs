//! `stats`: the ANOVA + Tukey correlate report over the study features.

use std::path::PathBuf;

use aggrospeech::dsp::FeatureRegistry;
use aggrospeech::stats::correlate_report;

use super::{CliError, Context};
use crate::manifest::RunManifest;

pub const CORRELATES_CSV: &str = "correlates.csv";
pub const CORRELATES_JSON: &str = "correlates.json";
pub const CLASS_MEANS_CSV: &str = "class_means.csv";

pub fn run(ctx: &Context, store_dir: &Option<PathBuf>) -> Result<(), CliError> {
    let store = ctx.load_store(store_dir)?;
    let dataset = store.to_dataset(ctx.language);
    let report = correlate_report(&dataset, &FeatureRegistry::study_features())?;

    ctx.write_text(CORRELATES_CSV, &report.to_csv())?;
    ctx.write_text(CORRELATES_JSON, &report.to_json())?;
    ctx.write_text(CLASS_MEANS_CSV, &report.class_means_csv())?;

    let mut manifest = RunManifest::new("stats", &ctx.config.canonical_toml());
    let dir = ctx.store_dir(store_dir);
    for file in [
        aggrospeech::store::FEATURES_FILE,
        aggrospeech::store::REGISTRY_FILE,
    ] {
        manifest.add_input(&dir.join(file))?;
    }
    manifest.write(&ctx.out_dir)?;

    log::info!(
        "correlate report over {} features written to {}",
        report.rows.len(),
        ctx.out_dir.display()
    );
    Ok(())
}
