//! Persist a trained model as JSON and get bit-identical scores back.

use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
use relaylearn::dataset::{split, Dataset};
use relaylearn::mlp::Preset;
use relaylearn::model::{Classifier, ModelFile};
use relaylearn::pipeline::{fit, FitOptions, ModelKind};

fn main() -> relaylearn::Result<()> {
    let cfg = ScenarioConfig { n_samples: 2000, ..ScenarioConfig::default() };
    let ds = Dataset::with_default_features(gen_dataset(&cfg)?)?;
    let (train, test) = split(&ds, 0.75, 1)?;
    let model = fit(ModelKind::Mlp(Preset::M2), &train, &FitOptions::default())?;

    let file = ModelFile { name: "m2".into(), provenance: None, model };
    let path = std::env::temp_dir().join("relaylearn_m2.json");
    file.save(&path)?;
    let back = ModelFile::load(&path)?;

    let a = file.model.scores(test.samples())?;
    let b = back.model.scores(test.samples())?;
    let identical = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
    println!("{} ({} kind) -> {}", back.name, back.model.kind(), path.display());
    println!("{} test scores bit-identical after reload: {identical}", a.len());
    Ok(())
}
