//! `validate`: schema-check every known output file in a directory.

use std::path::{Path, PathBuf};

use aggrospeech::classifier::TrainedModel;
use aggrospeech::store::{FeatureStore, FEATURES_FILE, FLAGS_FILE};

use super::evaluate::EvaluationDocument;
use super::{CliError, Context};

pub fn run(ctx: &Context, dir: &Option<PathBuf>) -> Result<(), CliError> {
    let dir = dir.clone().unwrap_or_else(|| ctx.out_dir.clone());
    if !dir.is_dir() {
        return Err(CliError::Data(format!("{} is not a directory", dir.display())));
    }

    let mut checked = 0usize;
    let mut failures = 0usize;
    let mut verdict = |name: &str, result: Result<(), String>| {
        checked += 1;
        match result {
            Ok(()) => println!("OK   {name}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    };

    if dir.join(FEATURES_FILE).exists() {
        verdict(
            FEATURES_FILE,
            FeatureStore::read_dir(&dir).map(|_| ()).map_err(|e| e.to_string()),
        );
    }
    if dir.join(super::train::MODEL_FILE).exists() {
        verdict(
            super::train::MODEL_FILE,
            validate_model(&dir.join(super::train::MODEL_FILE)),
        );
    }
    if dir.join(super::evaluate::EVALUATION_JSON).exists() {
        verdict(
            super::evaluate::EVALUATION_JSON,
            validate_evaluation(&dir.join(super::evaluate::EVALUATION_JSON)),
        );
    }
    if dir.join(super::ablate::ABLATION_CSV).exists() {
        verdict(
            super::ablate::ABLATION_CSV,
            validate_ablation(&dir.join(super::ablate::ABLATION_CSV)),
        );
    }
    for json_file in [
        super::stats::CORRELATES_JSON,
        super::train::TRAIN_SUMMARY_FILE,
        crate::manifest::RUN_MANIFEST_FILE,
    ] {
        if dir.join(json_file).exists() {
            verdict(json_file, validate_json(&dir.join(json_file)));
        }
    }
    for csv_file in [super::stats::CORRELATES_CSV, super::stats::CLASS_MEANS_CSV] {
        if dir.join(csv_file).exists() {
            verdict(csv_file, validate_csv(&dir.join(csv_file)));
        }
    }
    if dir.join(FLAGS_FILE).exists() && !dir.join(FEATURES_FILE).exists() {
        verdict(FLAGS_FILE, Err("flags sidecar without a feature store".to_string()));
    }

    if checked == 0 {
        return Err(CliError::Data(format!(
            "no recognized output files in {}",
            dir.display()
        )));
    }
    if failures > 0 {
        return Err(CliError::Data(format!("{failures} of {checked} files failed validation")));
    }
    log::info!("{checked} files validated in {}", dir.display());
    Ok(())
}

fn validate_model(path: &Path) -> Result<(), String> {
    let model = TrainedModel::load(path).map_err(|e| e.to_string())?;
    model.registry().map_err(|e| e.to_string())?;
    if model.pairs.len() != 3 {
        return Err(format!("expected 3 pairwise sub-models, found {}", model.pairs.len()));
    }
    for pair in &model.pairs {
        if pair.support_vectors.len() != pair.coefficients.len() {
            return Err("support vector and coefficient counts differ".to_string());
        }
    }
    Ok(())
}

fn validate_evaluation(path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let doc: EvaluationDocument = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let total: u64 = doc.confusion_matrix.iter().flatten().sum();
    if total != doc.overall.total {
        return Err(format!(
            "confusion counts sum to {total} but overall.total is {}",
            doc.overall.total
        ));
    }
    if (doc.overall.weighted_recall - doc.overall.accuracy).abs() > 1e-9 {
        return Err("weighted recall does not equal accuracy".to_string());
    }
    for (class, entry) in &doc.per_class {
        for (name, v) in [
            ("precision", entry.precision),
            ("recall", entry.recall),
            ("f1", entry.f1),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{class} {name} = {v} outside [0, 1]"));
            }
        }
    }
    // row sums match per-class supports
    for (i, class) in ["OAG", "CAG", "NAG"].iter().enumerate() {
        let row_sum: u64 = doc.confusion_matrix[i].iter().sum();
        if let Some(entry) = doc.per_class.get(*class) {
            if entry.support != row_sum {
                return Err(format!(
                    "{class} support {} does not match confusion row sum {row_sum}",
                    entry.support
                ));
            }
        }
    }
    Ok(())
}

fn validate_ablation(path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header != "prefix,n_features,accuracy,weighted_f1,kernel,c,gamma" {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut last_count = 0usize;
    let mut rows = 0usize;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("row has {} fields, expected 7", fields.len()));
        }
        let n: usize = fields[1].parse().map_err(|_| "bad n_features")?;
        if n < last_count {
            return Err("n_features decreases down the table".to_string());
        }
        let accuracy: f64 = fields[2].parse().map_err(|_| "bad accuracy")?;
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(format!("accuracy {accuracy} outside [0, 1]"));
        }
        last_count = n;
        rows += 1;
    }
    if rows == 0 {
        return Err("no data rows".to_string());
    }
    Ok(())
}

fn validate_json(path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    serde_json::from_str::<serde_json::Value>(&text)
        .map(|_| ())
        .map_err(|e| e.to_string())
}

fn validate_csv(path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let width = header.split(',').count();
    for (i, line) in lines.enumerate() {
        if line.split(',').count() != width {
            return Err(format!("row {} width differs from header", i + 1));
        }
    }
    Ok(())
}
