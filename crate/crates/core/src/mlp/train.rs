use log::{debug, warn};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::network::{Architecture, Gradients, Mlp, Workspace};
use crate::dataset::{Dataset, Feature, FeatureMatrix, Normalizer};
use crate::error::{Error, Result};
use crate::rng;

/// Mini-batch Adam settings plus the early-stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    /// 200 by default; with a 0.05 step, batches of 32 often kill every ReLU
    /// in the deeper presets within the first epoch.
    pub batch_size: usize,
    /// Minimum loss improvement that resets the stall counter. May be infinite.
    #[serde(with = "crate::serde_ext::f64_inf")]
    pub tol: f64,
    pub n_iter_no_change: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_epochs: 300,
            batch_size: 200,
            tol: 1e-4,
            n_iter_no_change: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be > 0, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("beta1 and beta2 must lie in [0, 1)".into());
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be > 0".into());
        }
        if !(self.tol >= 0.0) {
            return bad(format!("tol must be >= 0, got {}", self.tol));
        }
        if self.max_epochs == 0 || self.batch_size == 0 || self.n_iter_no_change == 0 {
            return bad("max_epochs, batch_size and n_iter_no_change must be >= 1".into());
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

/// Stall counter behind early stopping.
///
/// The first epoch sets the best loss. Every later epoch whose loss is not
/// below `best - tol` counts as a stall, an improving epoch resets the count,
/// and training stops once `n_iter_no_change` consecutive stalls accumulate.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    tol: f64,
    patience: usize,
    best: Option<f64>,
    stalls: usize,
}

impl EarlyStopping {
    pub fn new(tol: f64, patience: usize) -> Self {
        EarlyStopping {
            tol,
            patience,
            best: None,
            stalls: 0,
        }
    }

    /// Records one epoch's loss; returns true when training should stop.
    pub fn observe(&mut self, loss: f64) -> bool {
        match self.best {
            None => self.best = Some(loss),
            Some(best) => {
                if loss < best - self.tol {
                    self.stalls = 0;
                } else {
                    self.stalls += 1;
                }
                if loss < best {
                    self.best = Some(loss);
                }
            }
        }
        self.stalls >= self.patience
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }
}

/// Output of [`train_matrix`].
#[derive(Debug, Clone)]
pub struct Fit {
    pub network: Mlp,
    pub loss_history: Vec<f64>,
    pub validation_history: Vec<f64>,
}

/// Trains on already normalized rows. When `validation` is given its loss,
/// not the training loss, drives early stopping.
pub fn train_matrix(
    arch: &Architecture,
    cfg: &TrainConfig,
    x: &FeatureMatrix,
    y: &[u8],
    validation: Option<(&FeatureMatrix, &[u8])>,
) -> Result<Fit> {
    cfg.validate()?;
    arch.validate()?;
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.cols() != arch.input_dim {
        return Err(Error::DimensionMismatch {
            expected: arch.input_dim,
            got: x.cols(),
        });
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if y.iter().all(|&l| l == y[0]) {
        warn!("training labels are all {}", y[0]);
    }

    let mut net = Mlp::init(arch, &mut rng::substream(cfg.seed, 0))?;
    let mut shuffle_rng = rng::substream(cfg.seed, 1);
    let adam_cfg = cfg.adam();
    let mut states: Vec<(AdamState, AdamState)> = net
        .layers()
        .iter()
        .map(|l| {
            (
                AdamState::zeros(l.weights().len()),
                AdamState::zeros(l.biases().len()),
            )
        })
        .collect();
    let mut ws = Workspace::new(&net);
    let mut grads = Gradients::zeros_like(&net);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut stopper = EarlyStopping::new(cfg.tol, cfg.n_iter_no_change);
    let mut loss_history = Vec::new();
    let mut validation_history = Vec::new();
    let mut t = 0u64;
    let mut rows: Vec<&[f64]> = Vec::with_capacity(cfg.batch_size);
    let mut labels: Vec<u8> = Vec::with_capacity(cfg.batch_size);

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            rows.clear();
            labels.clear();
            rows.extend(batch.iter().map(|&i| x.row(i)));
            labels.extend(batch.iter().map(|&i| y[i]));
            let loss = net.backward_into(&rows, &labels, &mut ws, &mut grads)?;
            epoch_loss += loss * batch.len() as f64;
            t += 1;
            for ((layer, g), (sw, sb)) in net
                .layers_mut()
                .iter_mut()
                .zip(&grads.layers)
                .zip(states.iter_mut())
            {
                adam_step(layer.weights_mut(), &g.weights, sw, t, &adam_cfg);
                adam_step(layer.biases_mut(), &g.biases, sb, t, &adam_cfg);
            }
        }
        let epoch_loss = epoch_loss / x.rows() as f64;
        if !epoch_loss.is_finite() || !net.is_finite() {
            return Err(Error::Data(format!("training diverged at epoch {}", epoch + 1)));
        }
        loss_history.push(epoch_loss);

        let monitored = match validation {
            Some((vx, vy)) => {
                let vrows: Vec<&[f64]> = vx.iter_rows().collect();
                let vl = net.loss(&vrows, vy)?;
                validation_history.push(vl);
                vl
            }
            None => epoch_loss,
        };
        debug!("epoch {} loss {epoch_loss:.6}", epoch + 1);
        if stopper.observe(monitored) {
            break;
        }
    }

    Ok(Fit {
        network: net,
        loss_history,
        validation_history,
    })
}

/// A trained network together with everything needed to score raw link samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedMlp {
    pub architecture: Architecture,
    pub features: Vec<Feature>,
    pub normalizer: Normalizer,
    pub network: Mlp,
    pub config: TrainConfig,
    pub loss_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub validation_history: Vec<f64>,
    pub epochs_run: usize,
}

/// Fits the normalizer on `train`, then trains.
pub fn train(
    arch: &Architecture,
    cfg: &TrainConfig,
    train: &Dataset,
    validation: Option<&Dataset>,
) -> Result<TrainedMlp> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let raw = train.feature_matrix();
    let normalizer = Normalizer::fit(&raw)?;
    let x = normalizer.apply(&raw)?;
    let y = train.labels();
    let val = validation
        .map(|v| -> Result<_> {
            if v.features() != train.features() {
                return Err(Error::Schema("validation features differ from training".into()));
            }
            Ok((normalizer.apply(&v.feature_matrix())?, v.labels()))
        })
        .transpose()?;
    let fit = train_matrix(
        arch,
        cfg,
        &x,
        &y,
        val.as_ref().map(|(m, l)| (m, l.as_slice())),
    )?;
    Ok(TrainedMlp {
        architecture: arch.clone(),
        features: train.features().to_vec(),
        normalizer,
        epochs_run: fit.loss_history.len(),
        network: fit.network,
        config: cfg.clone(),
        loss_history: fit.loss_history,
        validation_history: fit.validation_history,
    })
}

impl TrainedMlp {
    /// P(strong | raw feature row).
    pub fn proba_row(&self, raw: &[f64]) -> Result<f64> {
        if raw.len() != self.normalizer.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.normalizer.dim(),
                got: raw.len(),
            });
        }
        let mut z = vec![0.0; raw.len()];
        self.normalizer.apply_row(raw, &mut z);
        self.network.forward(&z)
    }
}
