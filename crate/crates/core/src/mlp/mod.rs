//! Feed-forward network trained from scratch with backpropagation and Adam.

mod activation;
mod adam;
mod network;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use activation::{bce_loss, sigmoid, step_activation, Activation, BCE_CLAMP};
pub use adam::{adam_step, AdamConfig, AdamState};
pub use network::{Architecture, Gradients, Layer, LayerGrad, Mlp, Workspace};
pub use train::{train, train_matrix, EarlyStopping, Fit, TrainConfig, TrainedMlp};

use crate::error::{Error, Result};

/// The six reference architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::M1, Preset::M2, Preset::M3, Preset::M4, Preset::M5, Preset::M6];

    pub fn hidden_sizes(self) -> Vec<usize> {
        match self {
            Preset::M1 => vec![10],
            Preset::M2 => vec![50, 10],
            Preset::M3 => vec![10, 50, 10],
            Preset::M4 => vec![10, 50, 50, 10],
            Preset::M5 => vec![10, 50, 100, 50, 10],
            Preset::M6 => vec![10, 50, 100, 100, 50, 10],
        }
    }

    /// Model 1 trains with a much smaller step than the rest.
    pub fn default_learning_rate(self) -> f64 {
        match self {
            Preset::M1 => 1e-5,
            _ => 0.05,
        }
    }

    pub fn architecture(self, input_dim: usize) -> Result<Architecture> {
        Architecture::new(input_dim, self.hidden_sizes())
    }

    pub fn train_config(self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.default_learning_rate(),
            seed,
            ..TrainConfig::default()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::M1 => "m1",
            Preset::M2 => "m2",
            Preset::M3 => "m3",
            Preset::M4 => "m4",
            Preset::M5 => "m5",
            Preset::M6 => "m6",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown MLP preset '{s}'")))
    }
}

/// Class for a probability: 1 iff `p >= cutoff`.
pub fn predict_class(p: f64, cutoff: f64) -> u8 {
    u8::from(p >= cutoff)
}

/// Argmax over the two class posteriors `{1 - p, p}`, ties to class 1.
pub fn argmax_posterior(p: f64) -> u8 {
    u8::from(p >= 1.0 - p)
}
