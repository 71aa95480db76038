//! `evaluate`: re-derive the test split from the configured seed and
//! score the trained model on it.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use aggrospeech::classifier::{
    evaluate, split, ClassificationReport, ClassifierError, ConfusionMatrix, ModelParams,
    TrainedModel,
};
use aggrospeech::corpus::CoarseClass;

use super::{CliError, Context};
use crate::manifest::RunManifest;

pub const EVALUATION_JSON: &str = "evaluation.json";
pub const CONFUSION_CSV: &str = "confusion.csv";
pub const REPORT_CSV: &str = "report.csv";

#[derive(Debug, Serialize, Deserialize)]
pub struct EvaluationDocument {
    /// Row-major counts in class order OAG, CAG, NAG.
    pub confusion_matrix: [[u64; 3]; 3],
    pub per_class: BTreeMap<String, PerClassEntry>,
    pub overall: OverallEntry,
    pub params: Option<ModelParams>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PerClassEntry {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OverallEntry {
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub total: u64,
}

pub fn evaluation_document(
    cm: &ConfusionMatrix,
    report: &ClassificationReport,
    params: Option<ModelParams>,
) -> EvaluationDocument {
    let mut per_class = BTreeMap::new();
    for m in &report.per_class {
        per_class.insert(
            m.class.as_str().to_string(),
            PerClassEntry {
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                support: m.support,
            },
        );
    }
    EvaluationDocument {
        confusion_matrix: cm.counts,
        per_class,
        overall: OverallEntry {
            accuracy: report.accuracy,
            weighted_precision: report.weighted.precision,
            weighted_recall: report.weighted.recall,
            weighted_f1: report.weighted.f1,
            macro_precision: report.macro_avg.precision,
            macro_recall: report.macro_avg.recall,
            macro_f1: report.macro_avg.f1,
            total: cm.total(),
        },
        params,
    }
}

pub fn confusion_csv(cm: &ConfusionMatrix) -> String {
    let mut out = String::from("true\\predicted,OAG,CAG,NAG\n");
    for class in CoarseClass::ALL {
        let row = cm.counts[class.index()];
        out.push_str(&format!("{},{},{},{}\n", class.as_str(), row[0], row[1], row[2]));
    }
    out
}

pub fn report_csv(report: &ClassificationReport) -> String {
    let mut out = String::from("class,precision,recall,f1,support\n");
    for m in &report.per_class {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            m.class.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        ));
    }
    out.push_str(&format!(
        "weighted,{},{},{},\n",
        report.weighted.precision, report.weighted.recall, report.weighted.f1
    ));
    out.push_str(&format!(
        "macro,{},{},{},\n",
        report.macro_avg.precision, report.macro_avg.recall, report.macro_avg.f1
    ));
    out.push_str(&format!("accuracy,,,{},\n", report.accuracy));
    out
}

pub fn run(
    ctx: &Context,
    store_dir: &Option<PathBuf>,
    model_path: &Option<PathBuf>,
) -> Result<(), CliError> {
    let store = ctx.load_store(store_dir)?;
    let model_path = model_path
        .clone()
        .unwrap_or_else(|| ctx.out_dir.join(super::train::MODEL_FILE));
    let model = TrainedModel::load(&model_path)?;

    if model.registry_manifest != store.registry.manifest_text() {
        return Err(ClassifierError::RegistryMismatch {
            expected: model.n_features(),
            found: store.registry.len(),
        }
        .into());
    }

    let dataset = store.to_dataset(ctx.language);
    dataset.validate()?;
    let indices = split(&dataset.y, &ctx.config.split_spec())?;
    let x_test: Vec<Vec<f64>> = indices.test.iter().map(|&i| dataset.x[i].clone()).collect();
    let y_test: Vec<CoarseClass> = indices.test.iter().map(|&i| dataset.y[i]).collect();
    if x_test.is_empty() {
        return Err(CliError::Data("test split is empty".to_string()));
    }

    let (cm, report) = evaluate(&model, &x_test, &y_test)?;
    let document = evaluation_document(&cm, &report, Some(model.params.clone()));
    ctx.write_text(
        EVALUATION_JSON,
        &serde_json::to_string_pretty(&document).expect("evaluation serialization"),
    )?;
    ctx.write_text(CONFUSION_CSV, &confusion_csv(&cm))?;
    ctx.write_text(REPORT_CSV, &report_csv(&report))?;

    let mut manifest = RunManifest::new("evaluate", &ctx.config.canonical_toml());
    let dir = ctx.store_dir(store_dir);
    for file in [
        aggrospeech::store::FEATURES_FILE,
        aggrospeech::store::REGISTRY_FILE,
    ] {
        manifest.add_input(&dir.join(file))?;
    }
    manifest.add_input(&model_path)?;
    manifest.write(&ctx.out_dir)?;

    log::info!(
        "evaluation on {} test rows: accuracy {:.4}, weighted F1 {:.4}",
        cm.total(),
        report.accuracy,
        report.weighted.f1
    );
    Ok(())
}
