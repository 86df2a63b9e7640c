//! Confusion counts, threshold metrics and curves for a handful of scores.

use relaylearn::metrics::{auc_pairwise, report};

fn main() -> relaylearn::Result<()> {
    let scores = [0.95, 0.85, 0.80, 0.70, 0.55, 0.45, 0.40, 0.30, 0.20, 0.10];
    let labels = [1, 1, 0, 1, 1, 0, 1, 0, 0, 0];
    let preds: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();

    let r = report("toy", &scores, &preds, &labels)?;
    let c = r.confusion;
    println!("tp {} fp {} tn {} fn {}", c.tp, c.fp, c.tn, c.fn_);
    println!(
        "precision {:.3} recall {:.3} f1 {:.3} accuracy {:.3}",
        r.precision, r.recall, r.f1, r.accuracy
    );
    println!("ROC AUC {:.3} (pairwise {:.3})", r.roc_auc, auc_pairwise(&scores, &labels)?);
    println!("ROC: {}", fmt(r.roc_points.iter().map(|p| (p.x, p.y))));
    println!("PR:  {}", fmt(r.pr_points.iter().map(|p| (p.x, p.y))));
    Ok(())
}

fn fmt(points: impl Iterator<Item = (f64, f64)>) -> String {
    points.map(|(x, y)| format!("({x:.2},{y:.2})")).collect::<Vec<_>>().join(" ")
}
