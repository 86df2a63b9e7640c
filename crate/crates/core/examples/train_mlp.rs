//! Train one MLP preset on the standard synthetic dataset and report test metrics.
//!
//! cargo run --release --example train_mlp -- m5

use std::time::Instant;

use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
use relaylearn::dataset::{split, Dataset};
use relaylearn::mlp::{self, Preset};
use relaylearn::pipeline::evaluate;

fn main() -> relaylearn::Result<()> {
    let preset: Preset = std::env::args().nth(1).as_deref().unwrap_or("m5").parse()?;

    let ds = Dataset::with_default_features(gen_dataset(&ScenarioConfig::default())?)?;
    let (train, test) = split(&ds, 0.75, 42)?;

    let start = Instant::now();
    let arch = preset.architecture(train.features().len())?;
    let model = mlp::train(&arch, &preset.train_config(42), &train, None)?;
    let elapsed = start.elapsed();

    let r = evaluate(preset.name(), &model, &test)?;
    println!("{preset}: hidden {:?}, {} params", arch.hidden_sizes, model.network.num_params());
    println!(
        "epochs {} in {:.2?}, final loss {:.5}",
        model.epochs_run,
        elapsed,
        model.loss_history.last().copied().unwrap_or(f64::NAN)
    );
    println!("test accuracy {:.4}  roc_auc {:.4}  f1 {:.4}", r.accuracy, r.roc_auc, r.f1);
    Ok(())
}
