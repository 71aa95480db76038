//! `ablate`: the cumulative feature-group ablation table.

use std::path::PathBuf;

use aggrospeech::ablation::{ablation_csv, run_ablation, AblationPlan};
use aggrospeech::dsp::FeatureGroup;

use super::{CliError, Context};
use crate::manifest::RunManifest;

pub const ABLATION_CSV: &str = "ablation.csv";
pub const ABLATION_JSON: &str = "ablation.json";

pub fn run(ctx: &Context, store_dir: &Option<PathBuf>) -> Result<(), CliError> {
    let store = ctx.load_store(store_dir)?;
    if store.registry.group_size(FeatureGroup::Extended) == 0 {
        return Err(CliError::Data(
            "the default ablation plan ends with the extended group; re-extract the store \
             with features.registry = \"full\""
                .to_string(),
        ));
    }
    let dataset = store.to_dataset(ctx.language);
    dataset.validate()?;

    let plan = AblationPlan::standard(
        ctx.config.split_spec(),
        ctx.config
            .grid_spec()
            .map_err(|e| CliError::Usage(e.to_string()))?,
        ctx.config.train_options(),
    );
    let rows = run_ablation(&dataset, &plan)?;

    ctx.write_text(ABLATION_CSV, &ablation_csv(&rows))?;
    ctx.write_text(
        ABLATION_JSON,
        &serde_json::to_string_pretty(&rows).expect("ablation serialization"),
    )?;

    let mut manifest = RunManifest::new("ablate", &ctx.config.canonical_toml());
    let dir = ctx.store_dir(store_dir);
    for file in [
        aggrospeech::store::FEATURES_FILE,
        aggrospeech::store::REGISTRY_FILE,
    ] {
        manifest.add_input(&dir.join(file))?;
    }
    manifest.write(&ctx.out_dir)?;

    log::info!("{} ablation rows written to {}", rows.len(), ctx.out_dir.display());
    for row in &rows {
        log::info!(
            "  {:<16} {:>3} features  accuracy {:.4}  f1 {:.4}",
            row.prefix,
            row.n_features,
            row.accuracy,
            row.weighted_f1
        );
    }
    Ok(())
}
