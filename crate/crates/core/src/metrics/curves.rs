use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(x, y)`: `(fpr, tpr)` on ROC curves, `(recall, precision)` on PR curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
}

/// Cumulative (tp, fp) after each group of tied scores, then total positives
/// and negatives.
type Sweep = (Vec<(u64, u64)>, u64, u64);

/// Groups are visited highest score first.
fn threshold_sweep(scores: &[f64], labels: &[u8]) -> Result<Sweep> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count() as u64;
    let neg = labels.len() as u64 - pos;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut steps = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        steps.push((tp, fp));
    }
    Ok((steps, pos, neg))
}

/// ROC points from (0, 0) to (1, 1), one step per distinct score.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<CurvePoint>> {
    let (steps, pos, neg) = threshold_sweep(scores, labels)?;
    if pos == 0 || neg == 0 {
        return Err(Error::Data("ROC needs both positive and negative labels".into()));
    }
    let mut pts = Vec::with_capacity(steps.len() + 1);
    pts.push(CurvePoint { x: 0.0, y: 0.0 });
    pts.extend(steps.into_iter().map(|(tp, fp)| CurvePoint {
        x: fp as f64 / neg as f64,
        y: tp as f64 / pos as f64,
    }));
    Ok(pts)
}

/// Trapezoid area under a curve.
pub fn auc(points: &[CurvePoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].x - w[0].x) * (w[0].y + w[1].y) / 2.0)
        .sum()
}

/// Fraction of (positive, negative) pairs the scores order correctly, ties
/// counting one half. Quadratic; used as a reference.
pub fn auc_pairwise(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| l == 1).map(|(s, _)| *s).collect();
    let neg: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| l != 1).map(|(s, _)| *s).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Data("AUC needs both classes".into()));
    }
    let mut credit = 0.0;
    for p in &pos {
        for n in &neg {
            if p > n {
                credit += 1.0;
            } else if p == n {
                credit += 0.5;
            }
        }
    }
    Ok(credit / (pos.len() * neg.len()) as f64)
}

/// (recall, precision) after each distinct score threshold, highest first.
pub fn pr_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<CurvePoint>> {
    let (steps, pos, _) = threshold_sweep(scores, labels)?;
    if pos == 0 {
        return Err(Error::Data("precision-recall curve needs a positive label".into()));
    }
    Ok(steps
        .into_iter()
        .map(|(tp, fp)| CurvePoint {
            x: tp as f64 / pos as f64,
            y: tp as f64 / (tp + fp) as f64,
        })
        .collect())
}
