//! Learned relay selection for mmWave links.
//!
//! The crate synthesizes link datasets from the Floating-Intercept path-loss
//! model ([`channelsim`]), labels each link strong or weak by a path-loss
//! threshold ([`dataset`]), trains from-scratch multilayer perceptrons
//! ([`mlp`]) and three baseline classifiers ([`baselines`]), scores them
//! ([`metrics`]), and uses a trained model to pick relays and drive handover
//! ([`relay`]).
//!
//! ```no_run
//! use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
//! use relaylearn::dataset::{split, Dataset};
//! use relaylearn::mlp::Preset;
//! use relaylearn::pipeline::{evaluate, fit, FitOptions, ModelKind};
//!
//! # fn main() -> relaylearn::Result<()> {
//! let samples = gen_dataset(&ScenarioConfig::default())?;
//! let ds = Dataset::with_default_features(samples)?;
//! let (train, test) = split(&ds, 0.75, 42)?;
//! let model = fit(ModelKind::Mlp(Preset::M5), &train, &FitOptions::default())?;
//! let report = evaluate("m5", &model, &test)?;
//! println!("accuracy {:.3}  auc {:.3}", report.accuracy, report.roc_auc);
//! # Ok(())
//! # }
//! ```

// `!(x >= lo)` is how inputs are checked here: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channelsim;
pub mod cli;
pub mod dataset;
mod error;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod pipeline;
pub mod relay;
pub mod rng;
mod serde_ext;

pub use error::{Error, Result};
