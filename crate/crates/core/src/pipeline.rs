//! Glue between the pieces: named model kinds, fitting, and evaluation.

use std::fmt;
use std::str::FromStr;

use crate::baselines::{dummy_train, logreg_train, svm_train, FeatureMap, LogRegConfig, SvmConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{report, EvalReport};
use crate::mlp::{self, Preset};
use crate::model::{Classifier, Model};

/// Every trainable model: the six MLP presets and the three baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mlp(Preset),
    Logreg,
    Dummy,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::Mlp(Preset::M1),
        ModelKind::Mlp(Preset::M2),
        ModelKind::Mlp(Preset::M3),
        ModelKind::Mlp(Preset::M4),
        ModelKind::Mlp(Preset::M5),
        ModelKind::Mlp(Preset::M6),
        ModelKind::Logreg,
        ModelKind::Dummy,
        ModelKind::Svm,
    ];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Mlp(p) => write!(f, "{p}"),
            ModelKind::Logreg => f.write_str("logreg"),
            ModelKind::Dummy => f.write_str("dummy"),
            ModelKind::Svm => f.write_str("svm"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" => Ok(ModelKind::Logreg),
            "dummy" => Ok(ModelKind::Dummy),
            "svm" => Ok(ModelKind::Svm),
            other => other
                .parse::<Preset>()
                .map(ModelKind::Mlp)
                .map_err(|_| Error::Config(format!("unknown model '{s}'"))),
        }
    }
}

/// Overrides on top of each kind's defaults. `None` keeps the default.
#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    pub seed: u64,
    pub learning_rate: Option<f64>,
    pub max_epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub tol: Option<f64>,
    pub n_iter_no_change: Option<usize>,
    pub c: Option<f64>,
    pub feature_map: Option<FeatureMap>,
}

pub fn fit(kind: ModelKind, train: &Dataset, opts: &FitOptions) -> Result<Model> {
    match kind {
        ModelKind::Mlp(preset) => {
            let mut cfg = preset.train_config(opts.seed);
            if let Some(v) = opts.learning_rate {
                cfg.learning_rate = v;
            }
            if let Some(v) = opts.max_epochs {
                cfg.max_epochs = v;
            }
            if let Some(v) = opts.batch_size {
                cfg.batch_size = v;
            }
            if let Some(v) = opts.tol {
                cfg.tol = v;
            }
            if let Some(v) = opts.n_iter_no_change {
                cfg.n_iter_no_change = v;
            }
            let arch = preset.architecture(train.features().len())?;
            Ok(Model::Mlp(mlp::train(&arch, &cfg, train, None)?))
        }
        ModelKind::Logreg => {
            let mut cfg = LogRegConfig::default();
            if let Some(v) = opts.learning_rate {
                cfg.learning_rate = v;
            }
            if let Some(v) = opts.max_epochs {
                cfg.max_epochs = v;
            }
            if let Some(v) = opts.tol {
                cfg.tol = v;
            }
            Ok(Model::Logreg(logreg_train(train, &cfg)?))
        }
        ModelKind::Dummy => Ok(Model::Dummy(dummy_train(train)?)),
        ModelKind::Svm => {
            let mut cfg = SvmConfig::default();
            if let Some(v) = opts.learning_rate {
                cfg.learning_rate = v;
            }
            if let Some(v) = opts.max_epochs {
                cfg.max_epochs = v;
            }
            if let Some(v) = opts.c {
                cfg.c = v;
            }
            if let Some(v) = opts.feature_map {
                cfg.feature_map = v;
            }
            Ok(Model::Svm(svm_train(train, &cfg)?))
        }
    }
}

/// Scores, thresholded predictions and the full metric report on `test`.
pub fn evaluate<C: Classifier + ?Sized>(name: &str, model: &C, test: &Dataset) -> Result<EvalReport> {
    let scores = model.scores(test.samples())?;
    let preds: Vec<u8> = scores.iter().map(|&s| model.class_of(s)).collect();
    report(name, &scores, &preds, &test.labels())
}
