use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{accuracy, auc, confusion, f1, pr_curve, precision, recall, roc_curve, ConfusionMatrix, CurvePoint};
use crate::error::{Error, Result};

/// Everything reported for one model on one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_name: String,
    pub n: usize,
    pub confusion: ConfusionMatrix,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub roc_auc: f64,
    pub roc_points: Vec<CurvePoint>,
    pub pr_points: Vec<CurvePoint>,
}

pub fn report(model_name: &str, scores: &[f64], preds: &[u8], labels: &[u8]) -> Result<EvalReport> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let cm = confusion(preds, labels)?;
    let roc_points = roc_curve(scores, labels)?;
    let pr_points = pr_curve(scores, labels)?;
    Ok(EvalReport {
        model_name: model_name.to_string(),
        n: labels.len(),
        confusion: cm,
        precision: precision(&cm),
        recall: recall(&cm),
        f1: f1(&cm),
        accuracy: accuracy(&cm),
        roc_auc: auc(&roc_points),
        roc_points,
        pr_points,
    })
}

/// Ranks by accuracy, then ROC AUC (both descending), then name.
pub fn compare(mut reports: Vec<EvalReport>) -> Vec<EvalReport> {
    reports.sort_by(EvalReport::rank_order);
    reports
}

pub const TABLE_COLUMNS: [&str; 6] = ["model", "precision", "recall", "f1", "accuracy", "roc_auc"];

/// `model,precision,recall,f1,accuracy,roc_auc`, one row per report, in order.
pub fn reports_csv(reports: &[EvalReport]) -> String {
    let mut out = TABLE_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&r.model_name),
            r.precision,
            r.recall,
            r.f1,
            r.accuracy,
            r.roc_auc
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column CSV of a curve.
pub fn curve_csv(x_name: &str, y_name: &str, points: &[CurvePoint]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

impl EvalReport {
    pub fn ranks_above(&self, other: &EvalReport) -> bool {
        self.rank_order(other) == Ordering::Less
    }

    fn rank_order(&self, other: &EvalReport) -> Ordering {
        other
            .accuracy
            .total_cmp(&self.accuracy)
            .then_with(|| other.roc_auc.total_cmp(&self.roc_auc))
            .then_with(|| self.model_name.cmp(&other.model_name))
    }
}
