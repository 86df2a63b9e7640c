//! Handover along a mobility trace: the serving relay is kept while it is
//! predicted strong; hysteresis makes the switch harder.

use relaylearn::channelsim::{gen_dataset, gen_trajectory, ScenarioConfig};
use relaylearn::dataset::{split, Dataset, LabelRule};
use relaylearn::mlp::Preset;
use relaylearn::model::{Classifier, PathLossOracle};
use relaylearn::pipeline::{fit, FitOptions, ModelKind};
use relaylearn::relay::{group_instances, handover_sim};

fn main() -> relaylearn::Result<()> {
    let ds = Dataset::with_default_features(gen_dataset(&ScenarioConfig::default())?)?;
    let (train, _) = split(&ds, 0.75, 42)?;
    let m5 = fit(ModelKind::Mlp(Preset::M5), &train, &FitOptions { seed: 42, ..FitOptions::default() })?;
    let oracle = PathLossOracle::new(&LabelRule::default(), 10.0)?;

    let cfg = ScenarioConfig { seed: 9, ..ScenarioConfig::default() };
    let trace = gen_trajectory(&cfg, 1000, 0.5)?;
    let steps = group_instances(&trace, cfg.n_candidates)?;
    let rule = LabelRule::default();

    let models: [(&str, &dyn Classifier); 2] = [("m5", &m5), ("oracle", &oracle)];
    println!("{:>8} {:>14} {:>9} {:>8}", "model", "hysteresis dB", "switches", "outage");
    for (name, model) in models {
        for h in [0.0, 1.0, 3.0, 6.0] {
            let t = handover_sim(model, &steps, &rule, h)?;
            println!("{name:>8} {h:>14.1} {:>9} {:>8.4}", t.switch_count, t.outage_fraction);
        }
    }
    Ok(())
}
