//! `report`: derive a classification report from a stored confusion
//! matrix and print it.

use std::path::Path;

use serde::Deserialize;

use aggrospeech::classifier::{report_from_confusion, ConfusionMatrix};

use super::evaluate::{evaluation_document, report_csv, EVALUATION_JSON, REPORT_CSV};
use super::{CliError, Context};

/// Accepts either `{"counts": [[...]]}`, a full evaluation document, or
/// a bare 3x3 array.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ConfusionInput {
    Wrapped { counts: [[u64; 3]; 3] },
    Evaluation { confusion_matrix: [[u64; 3]; 3] },
    Bare([[u64; 3]; 3]),
}

pub fn run(ctx: &Context, confusion_path: &Path) -> Result<(), CliError> {
    let input: ConfusionInput = super::read_json_file(confusion_path)?;
    let counts = match input {
        ConfusionInput::Wrapped { counts } => counts,
        ConfusionInput::Evaluation { confusion_matrix } => confusion_matrix,
        ConfusionInput::Bare(counts) => counts,
    };
    let cm = ConfusionMatrix::from_rows(counts);
    if cm.total() == 0 {
        return Err(CliError::Data("confusion matrix is empty".to_string()));
    }
    let report = report_from_confusion(&cm);

    println!("class  precision  recall  f1      support");
    for m in &report.per_class {
        println!(
            "{:<6} {:<10.2} {:<7.2} {:<7.2} {}",
            m.class.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        );
    }
    println!(
        "accuracy {:.4}   weighted P/R/F1 {:.2}/{:.2}/{:.2}",
        report.accuracy, report.weighted.precision, report.weighted.recall, report.weighted.f1
    );

    let document = evaluation_document(&cm, &report, None);
    ctx.write_text(
        EVALUATION_JSON,
        &serde_json::to_string_pretty(&document).expect("evaluation serialization"),
    )?;
    ctx.write_text(REPORT_CSV, &report_csv(&report))?;
    Ok(())
}
