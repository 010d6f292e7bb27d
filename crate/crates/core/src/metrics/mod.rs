//! Confusion matrices, error rates, one-vs-rest ROC/AUC, cumulative gain
//! curves and the frequency report.

mod confusion;
mod curves;
mod report;

use serde::{Deserialize, Serialize};

pub use confusion::{
    accuracy, confusion, confusion_from_indices, error_rate, std_error, ConfusionMatrix,
};
pub use curves::{gain, points_csv, roc_auc, GainCurve, RocCurve};
pub use report::{format_percent, format_ratio_percent, frequency_report, FrequencyReport};

use crate::error::Result;
use crate::tree::Prediction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAuc {
    pub class: String,
    /// `None` when the evaluated rows hold only one side of the split.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub rows: usize,
    pub accuracy: f64,
    pub error_rate: f64,
    pub std_error: f64,
    pub per_class_auc: Vec<ClassAuc>,
}

/// Everything computed for one model on one evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub summary: EvalSummary,
    pub confusion: ConfusionMatrix,
    pub roc: Vec<Option<RocCurve>>,
    pub gain: Vec<Option<GainCurve>>,
}

/// Scores each class one-vs-rest with the predicted probability of that class.
pub fn evaluate(
    predictions: &[Prediction],
    actual: &[usize],
    classes: &[String],
) -> Result<Evaluation> {
    let predicted: Vec<usize> = predictions.iter().map(|p| p.class).collect();
    let cm = confusion_from_indices(actual, &predicted, classes)?;
    let acc = accuracy(&cm)?;
    let err = error_rate(&cm)?;
    let se = std_error(err, cm.total() as usize)?;
    let mut roc = Vec::with_capacity(classes.len());
    let mut gains = Vec::with_capacity(classes.len());
    let mut per_class_auc = Vec::with_capacity(classes.len());
    for (c, name) in classes.iter().enumerate() {
        let scores: Vec<f64> = predictions.iter().map(|p| p.distribution[c]).collect();
        let curve = roc_auc(&scores, actual, c).ok();
        per_class_auc.push(ClassAuc {
            class: name.clone(),
            auc: curve.as_ref().map(|r| r.auc),
        });
        roc.push(curve);
        gains.push(gain(&scores, actual, c).ok());
    }
    Ok(Evaluation {
        summary: EvalSummary {
            rows: actual.len(),
            accuracy: acc,
            error_rate: err,
            std_error: se,
            per_class_auc,
        },
        confusion: cm,
        roc,
        gain: gains,
    })
}
