//! One scoring interface over every classifier, and the JSON envelope they are
//! saved in.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{DummyModel, LogRegModel, SvmModel};
use crate::channelsim::LinkSample;
use crate::dataset::{Feature, LabelRule};
use crate::error::{Error, Result};
use crate::mlp::{sigmoid, TrainedMlp};

/// Scores raw link samples; larger means "more likely a strong link".
pub trait Classifier {
    fn features(&self) -> &[Feature];

    /// Score of one raw (unnormalized) row laid out as [`Classifier::features`].
    fn score_row(&self, raw: &[f64]) -> Result<f64>;

    /// Scores at or above the cutoff are class 1.
    fn cutoff(&self) -> f64 {
        0.5
    }

    fn score(&self, s: &LinkSample) -> Result<f64> {
        let raw: Vec<f64> = self.features().iter().map(|f| f.value(s)).collect();
        self.score_row(&raw)
    }

    fn class_of(&self, score: f64) -> u8 {
        u8::from(score >= self.cutoff())
    }

    fn scores(&self, samples: &[LinkSample]) -> Result<Vec<f64>> {
        samples.iter().map(|s| self.score(s)).collect()
    }

    fn predict(&self, samples: &[LinkSample]) -> Result<Vec<u8>> {
        samples
            .iter()
            .map(|s| self.score(s).map(|p| self.class_of(p)))
            .collect()
    }
}

impl Classifier for TrainedMlp {
    fn features(&self) -> &[Feature] {
        &self.features
    }

    fn score_row(&self, raw: &[f64]) -> Result<f64> {
        self.proba_row(raw)
    }
}

impl Classifier for LogRegModel {
    fn features(&self) -> &[Feature] {
        &self.features
    }

    fn score_row(&self, raw: &[f64]) -> Result<f64> {
        LogRegModel::score_row(self, raw)
    }
}

impl Classifier for SvmModel {
    fn features(&self) -> &[Feature] {
        &self.features
    }

    fn score_row(&self, raw: &[f64]) -> Result<f64> {
        SvmModel::score_row(self, raw)
    }

    fn cutoff(&self) -> f64 {
        0.0
    }
}

impl Classifier for DummyModel {
    fn features(&self) -> &[Feature] {
        &self.features
    }

    fn score_row(&self, _raw: &[f64]) -> Result<f64> {
        Ok(self.positive_rate)
    }
}

/// Reference scorer that reads the true path loss:
/// `P(strong) = sigmoid((threshold_db - path_loss_db) / scale_db)`.
///
/// Strictly decreasing in path loss, so its argmax is the minimum-loss link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossOracle {
    pub threshold_db: f64,
    pub scale_db: f64,
    #[serde(skip, default = "oracle_features")]
    features: Vec<Feature>,
}

fn oracle_features() -> Vec<Feature> {
    vec![Feature::PathLossDb]
}

impl PathLossOracle {
    pub fn new(rule: &LabelRule, scale_db: f64) -> Result<Self> {
        if !(scale_db > 0.0) {
            return Err(Error::Config(format!("scale_db must be > 0, got {scale_db}")));
        }
        Ok(PathLossOracle {
            threshold_db: rule.threshold_db,
            scale_db,
            features: oracle_features(),
        })
    }
}

impl Classifier for PathLossOracle {
    fn features(&self) -> &[Feature] {
        &self.features
    }

    fn score_row(&self, raw: &[f64]) -> Result<f64> {
        match raw {
            [pl] => Ok(sigmoid((self.threshold_db - pl) / self.scale_db)),
            _ => Err(Error::DimensionMismatch {
                expected: 1,
                got: raw.len(),
            }),
        }
    }
}

/// Any trained classifier, discriminated by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Mlp(TrainedMlp),
    Logreg(LogRegModel),
    Dummy(DummyModel),
    Svm(SvmModel),
    Oracle(PathLossOracle),
}

impl Model {
    fn inner(&self) -> &dyn Classifier {
        match self {
            Model::Mlp(m) => m,
            Model::Logreg(m) => m,
            Model::Dummy(m) => m,
            Model::Svm(m) => m,
            Model::Oracle(m) => m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Mlp(_) => "mlp",
            Model::Logreg(_) => "logreg",
            Model::Dummy(_) => "dummy",
            Model::Svm(_) => "svm",
            Model::Oracle(_) => "oracle",
        }
    }

    /// Per-epoch training loss (objective, for the SVM), where one exists.
    pub fn loss_history(&self) -> &[f64] {
        match self {
            Model::Mlp(m) => &m.loss_history,
            Model::Logreg(m) => &m.loss_history,
            Model::Svm(m) => &m.objective_history,
            Model::Dummy(_) | Model::Oracle(_) => &[],
        }
    }
}

impl Classifier for Model {
    fn features(&self) -> &[Feature] {
        self.inner().features()
    }

    fn score_row(&self, raw: &[f64]) -> Result<f64> {
        self.inner().score_row(raw)
    }

    fn cutoff(&self) -> f64 {
        self.inner().cutoff()
    }
}

/// Where a model's training data came from; enough to rebuild its split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub train_fraction: f64,
    pub dataset_rows: usize,
    pub dataset_digest: String,
    pub label_rule: LabelRule,
}

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub model: Model,
}

impl ModelFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("model file: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{dummy_train, logreg_train, svm_train, FeatureMap, LogRegConfig, SvmConfig};
    use crate::channelsim::{gen_dataset, ScenarioConfig};
    use crate::dataset::Dataset;
    use crate::mlp::{train, Architecture, TrainConfig};

    fn small() -> Dataset {
        let cfg = ScenarioConfig { n_samples: 300, ..Default::default() };
        Dataset::with_default_features(gen_dataset(&cfg).unwrap()).unwrap()
    }

    fn round_trip(m: Model, ds: &Dataset) {
        let file = ModelFile { name: m.kind().into(), provenance: None, model: m };
        let text = file.to_json().unwrap();
        let back = ModelFile::from_json(&text).unwrap();
        let a = file.model.scores(ds.samples()).unwrap();
        let b = back.model.scores(ds.samples()).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn every_kind_round_trips_bit_exactly() {
        let ds = small();
        let arch = Architecture::new(6, vec![5, 3]).unwrap();
        let cfg = TrainConfig { max_epochs: 5, ..Default::default() };
        round_trip(Model::Mlp(train(&arch, &cfg, &ds, None).unwrap()), &ds);
        let lr = LogRegConfig { max_epochs: 20, ..Default::default() };
        round_trip(Model::Logreg(logreg_train(&ds, &lr).unwrap()), &ds);
        round_trip(Model::Dummy(dummy_train(&ds).unwrap()), &ds);
        let sc = SvmConfig { max_epochs: 10, feature_map: FeatureMap::Poly4, ..Default::default() };
        round_trip(Model::Svm(svm_train(&ds, &sc).unwrap()), &ds);
        round_trip(Model::Oracle(PathLossOracle::new(&LabelRule::default(), 2.0).unwrap()), &ds);
    }

    #[test]
    fn infinite_tol_survives_json() {
        let ds = small();
        let arch = Architecture::new(6, vec![2]).unwrap();
        let cfg = TrainConfig { max_epochs: 3, tol: f64::INFINITY, ..Default::default() };
        let m = Model::Mlp(train(&arch, &cfg, &ds, None).unwrap());
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"inf\""));
        let back: Model = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn unknown_feature_is_a_schema_error() {
        let text = r#"{"name":"d","model":{"kind":"dummy","features":["snr"],"majority":1,"positive_rate":0.7}}"#;
        assert!(matches!(ModelFile::from_json(text), Err(Error::Schema(_))));
        let ok = r#"{"name":"d","model":{"kind":"dummy","features":["distance_m"],"majority":1,"positive_rate":0.7}}"#;
        assert!(ModelFile::from_json(ok).is_ok());
    }

    #[test]
    fn oracle_is_decreasing_in_path_loss() {
        let o = PathLossOracle::new(&LabelRule::default(), 3.0).unwrap();
        let a = o.score_row(&[100.0]).unwrap();
        let b = o.score_row(&[110.0]).unwrap();
        assert!(a > b);
        assert_eq!(o.score_row(&[120.0]).unwrap(), 0.5);
        assert!(o.score_row(&[1.0, 2.0]).is_err());
        assert!(PathLossOracle::new(&LabelRule::default(), 0.0).is_err());
    }
}
