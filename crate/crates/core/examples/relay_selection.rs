//! Pick the best of four candidate relays with a trained classifier and
//! measure how often it matches the true minimum-path-loss choice.

use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
use relaylearn::dataset::{split, Dataset, LabelRule};
use relaylearn::mlp::Preset;
use relaylearn::model::PathLossOracle;
use relaylearn::pipeline::{fit, FitOptions, ModelKind};
use relaylearn::relay::{group_instances, select_oracle, select_predicted, selection_accuracy, wilson_interval};

fn main() -> relaylearn::Result<()> {
    let ds = Dataset::with_default_features(gen_dataset(&ScenarioConfig::default())?)?;
    let (train, _) = split(&ds, 0.75, 42)?;
    let model = fit(ModelKind::Mlp(Preset::M5), &train, &FitOptions { seed: 42, ..FitOptions::default() })?;

    // Fresh instances the model never saw.
    let cfg = ScenarioConfig { seed: 2024, n_samples: 4 * 2000, ..ScenarioConfig::default() };
    let instances = group_instances(&gen_dataset(&cfg)?, cfg.n_candidates)?;

    let mut hits = 0;
    let mut flagged = 0;
    for cs in &instances {
        let d = select_predicted(&model, cs)?;
        hits += usize::from(d.chosen_index == select_oracle(cs));
        flagged += usize::from(d.chosen_class == 0);
    }
    let n = instances.len();
    let (lo, hi) = wilson_interval(hits, n, 1.96);
    println!("m5 picks the best relay in {hits}/{n} instances ({:.3}, 95% CI {lo:.3}..{hi:.3})", hits as f64 / n as f64);
    println!("{flagged} instances had no candidate predicted strong");

    let oracle = PathLossOracle::new(&LabelRule::default(), 10.0)?;
    println!("path-loss oracle selection accuracy: {}", selection_accuracy(&oracle, &instances)?);

    let cs = &instances[0];
    let d = select_predicted(&model, cs)?;
    println!("instance 0:");
    for (k, (link, score)) in cs.links.iter().zip(&d.scores).enumerate() {
        let mark = if k == d.chosen_index { "<- chosen" } else { "" };
        println!("  relay {k}: PL {:6.2} dB  P(strong) {score:.4} {mark}", link.path_loss_db);
    }
    Ok(())
}
