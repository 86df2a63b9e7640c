//! Binary classification metrics. Class 1 is the positive class throughout,
//! and any ratio whose denominator is zero is reported as 0.

mod curves;
mod report;
pub mod svg;

use serde::{Deserialize, Serialize};

pub use curves::{auc, auc_pairwise, pr_curve, roc_curve, CurvePoint};
pub use report::{compare, curve_csv, report, reports_csv, EvalReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(preds: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if preds.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: preds.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &l) in preds.iter().zip(labels) {
        match (p == 1, l == 1) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Pooled-count precision `tp / (tp + fp)`.
pub fn precision(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fp)
}

/// Pooled-count recall `tp / (tp + fn)`.
pub fn recall(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fn_)
}

/// Harmonic mean of precision and recall.
pub fn f1(cm: &ConfusionMatrix) -> f64 {
    f1_from(precision(cm), recall(cm))
}

pub fn f1_from(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp + cm.tn, cm.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_counts() {
        let cm = confusion(&[1, 1, 0, 0], &[1, 1, 0, 0]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 2, fp: 0, tn: 2, fn_: 0 });
        let cm = confusion(&[1, 1, 1, 0], &[1, 0, 1, 1]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 2, fp: 1, tn: 0, fn_: 1 });
        let cm = confusion(&[0; 5], &[1; 5]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 0, fp: 0, tn: 0, fn_: 5 });
        assert!(confusion(&[1, 0], &[1]).is_err());
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn ratios() {
        let cm = ConfusionMatrix { tp: 3, fp: 1, tn: 0, fn_: 0 };
        assert_eq!(precision(&cm), 0.75);
        assert!((f1_from(0.98, 0.98) - 0.98).abs() < 1e-15);

        let all_neg = ConfusionMatrix { tp: 0, fp: 0, tn: 5, fn_: 0 };
        assert_eq!(precision(&all_neg), 0.0);
        assert_eq!(recall(&all_neg), 0.0);
        assert_eq!(f1(&all_neg), 0.0);
        assert_eq!(accuracy(&all_neg), 1.0);
    }
}
