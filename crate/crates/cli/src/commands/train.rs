//! `train`: split, standardize, grid search, write the model and the
//! validation summary. The test split is never touched here.

use std::path::PathBuf;

use serde::Serialize;

use aggrospeech::classifier::{fit_on_split, split, CandidateScore, SelectedParams};

use super::{CliError, Context};
use crate::manifest::RunManifest;

pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_SUMMARY_FILE: &str = "train_summary.json";

#[derive(Debug, Serialize)]
struct TrainSummary {
    selected: SelectedParams,
    validation_accuracy: f64,
    n_train: usize,
    n_validate: usize,
    n_test: usize,
    split_warnings: Vec<String>,
    scores: Vec<CandidateScore>,
}

pub fn run(ctx: &Context, store_dir: &Option<PathBuf>) -> Result<(), CliError> {
    let store = ctx.load_store(store_dir)?;
    let dataset = store.to_dataset(ctx.language);
    dataset.validate()?;

    let split_spec = ctx.config.split_spec();
    let grid = ctx
        .config
        .grid_spec()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let options = ctx.config.train_options();

    let indices = split(&dataset.y, &split_spec)?;
    for warning in &indices.warnings {
        log::warn!("{warning}");
    }
    let outcome = fit_on_split(&dataset, &indices, &grid, &options)?;

    std::fs::create_dir_all(&ctx.out_dir)?;
    outcome.model.save(&ctx.out_dir.join(MODEL_FILE))?;
    let summary = TrainSummary {
        selected: outcome.selected,
        validation_accuracy: outcome.validation_accuracy,
        n_train: indices.train.len(),
        n_validate: indices.validate.len(),
        n_test: indices.test.len(),
        split_warnings: indices.warnings.clone(),
        scores: outcome.scores,
    };
    ctx.write_text(
        TRAIN_SUMMARY_FILE,
        &serde_json::to_string_pretty(&summary).expect("summary serialization"),
    )?;

    let mut manifest = RunManifest::new("train", &ctx.config.canonical_toml());
    let dir = ctx.store_dir(store_dir);
    for file in [
        aggrospeech::store::FEATURES_FILE,
        aggrospeech::store::REGISTRY_FILE,
    ] {
        manifest.add_input(&dir.join(file))?;
    }
    manifest.write(&ctx.out_dir)?;

    log::info!(
        "model written to {} (validation accuracy {:.4}, kernel {}, C {})",
        ctx.out_dir.join(MODEL_FILE).display(),
        summary.validation_accuracy,
        summary.selected.kernel,
        summary.selected.c
    );
    Ok(())
}
