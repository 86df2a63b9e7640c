//! Train all six MLP presets and the three baselines on one split and rank
//! them. Pass a directory to also get ROC, PR and loss plots as SVG.
//!
//! cargo run --release --example compare_models -- [plot_dir]

use std::path::PathBuf;

use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
use relaylearn::dataset::{split, Dataset};
use relaylearn::metrics::svg::{line_plot, Series};
use relaylearn::metrics::{compare, reports_csv};
use relaylearn::pipeline::{evaluate, fit, FitOptions, ModelKind};

fn main() -> relaylearn::Result<()> {
    let plot_dir = std::env::args().nth(1).map(PathBuf::from);
    let ds = Dataset::with_default_features(gen_dataset(&ScenarioConfig::default())?)?;
    let (train, test) = split(&ds, 0.75, 42)?;
    let opts = FitOptions { seed: 42, ..FitOptions::default() };

    let mut reports = Vec::new();
    let mut losses = Vec::new();
    for kind in ModelKind::ALL {
        let model = fit(kind, &train, &opts)?;
        reports.push(evaluate(&kind.to_string(), &model, &test)?);
        losses.push((kind.to_string(), model.loss_history().to_vec()));
    }
    let ranked = compare(reports);
    print!("{}", reports_csv(&ranked));

    if let Some(dir) = plot_dir {
        std::fs::create_dir_all(&dir).expect("create plot directory");
        let roc: Vec<(String, Vec<(f64, f64)>)> = ranked
            .iter()
            .map(|r| (r.model_name.clone(), r.roc_points.iter().map(|p| (p.x, p.y)).collect()))
            .collect();
        // Only the MLP curves share an epoch scale worth overlaying.
        let loss: Vec<(String, Vec<(f64, f64)>)> = losses
            .into_iter()
            .filter(|(n, _)| n.starts_with('m'))
            .map(|(n, h)| (n, h.iter().enumerate().map(|(i, &l)| ((i + 1) as f64, l)).collect()))
            .collect();
        for (file, title, xl, yl, data, unit) in [
            ("roc.svg", "ROC", "false positive rate", "true positive rate", &roc, true),
            ("loss.svg", "Training loss", "epoch", "loss", &loss, false),
        ] {
            let s: Vec<Series<'_>> = data.iter().map(|(n, p)| Series { name: n, points: p }).collect();
            std::fs::write(dir.join(file), line_plot(title, xl, yl, &s, unit)).expect("write plot");
        }
        println!("plots written to {}", dir.display());
    }
    Ok(())
}
