//! Synthetic mmWave link records from the Floating-Intercept path-loss model.
//!
//! `PL(d) = alpha + 10 * beta * log10(d) + X`, with `X ~ N(0, sigma^2)` in dB.
//!
//! Defaults describe a 28 GHz urban microcell: 1 to 40 m links, 800 MHz of
//! bandwidth and 30 dBm transmit power. The FI constants (72.0 dB, 2.92,
//! 8.7 dB) are representative published 28 GHz UMi fits.
//!
//! Besides distance and path loss every sample carries a few auxiliary
//! channel-state features:
//!
//! | feature          | law                                         |
//! |------------------|---------------------------------------------|
//! | `num_paths`      | `1 + Poisson(4)`                            |
//! | `rms_delay_ns`   | `Exponential(mean = 20 + 0.5 * distance_m)` |
//! | `aoa_spread_deg` | `Uniform(5, 60)`                            |
//! | `aod_spread_deg` | `Uniform(5, 60)`                            |

use rand::Rng as _;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::dataset::{self, LabelRule};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Floating-Intercept model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiParams {
    /// Floating intercept, dB.
    pub alpha: f64,
    /// Path-loss exponent slope.
    pub beta: f64,
    /// Shadow-fading standard deviation, dB.
    pub sigma: f64,
}

impl Default for FiParams {
    fn default() -> Self {
        FiParams {
            alpha: 72.0,
            beta: 2.92,
            sigma: 8.7,
        }
    }
}

impl FiParams {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("alpha and beta must be finite".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Scenario parameters for dataset synthesis. Field names double as JSON keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub d_min: f64,
    pub d_max: f64,
    pub freq_ghz: f64,
    pub bandwidth_mhz: f64,
    pub tx_power_dbm: f64,
    pub n_samples: usize,
    /// Links per selection instance.
    pub n_candidates: usize,
    pub seed: u64,
    pub fi: FiParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            d_min: 1.0,
            d_max: 40.0,
            freq_ghz: 28.0,
            bandwidth_mhz: 800.0,
            tx_power_dbm: 30.0,
            n_samples: 10_000,
            n_candidates: 4,
            seed: 42,
            fi: FiParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.fi.validate()?;
        if !(self.d_min > 0.0 && self.d_min <= self.d_max && self.d_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < d_min <= d_max, got d_min={} d_max={}",
                self.d_min, self.d_max
            )));
        }
        if self.n_candidates == 0 {
            return Err(Error::Config("n_candidates must be >= 1".into()));
        }
        for (name, v) in [
            ("freq_ghz", self.freq_ghz),
            ("bandwidth_mhz", self.bandwidth_mhz),
            ("tx_power_dbm", self.tx_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// One candidate link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub link_id: u64,
    pub distance_m: f64,
    pub freq_ghz: f64,
    pub tx_power_dbm: f64,
    pub rx_power_dbm: f64,
    pub rms_delay_ns: f64,
    pub num_paths: u32,
    pub aoa_spread_deg: f64,
    pub aod_spread_deg: f64,
    pub path_loss_db: f64,
    /// 1 = strong link, 0 = weak link.
    pub label: u8,
}

/// Floating-Intercept path loss in dB.
pub fn fi_path_loss(fi: &FiParams, distance_m: f64, shadow_db: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::Domain(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(fi.alpha + 10.0 * fi.beta * distance_m.log10() + shadow_db)
}

/// One zero-mean Gaussian shadow-fading draw in dB.
///
/// Box-Muller on two uniforms; always consumes exactly two `u64` outputs of
/// `rng`, including when `sigma == 0`.
pub fn sample_shadow(rng: &mut Rng, sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
    }
    // u1 in (0, 1] keeps the log finite.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    Ok(sigma * z)
}

/// Draws one link at a uniformly random distance, labelled with the default rule.
pub fn gen_link(rng: &mut Rng, cfg: &ScenarioConfig, link_id: u64) -> Result<LinkSample> {
    let distance_m = if cfg.d_min == cfg.d_max {
        // still consume the draw so streams line up across configs
        let _ = rng.random::<f64>();
        cfg.d_min
    } else {
        cfg.d_min + (cfg.d_max - cfg.d_min) * rng.random::<f64>()
    };
    link_at_distance(rng, cfg, link_id, distance_m)
}

fn link_at_distance(
    rng: &mut Rng,
    cfg: &ScenarioConfig,
    link_id: u64,
    distance_m: f64,
) -> Result<LinkSample> {
    let shadow = sample_shadow(rng, cfg.fi.sigma)?;
    let path_loss_db = fi_path_loss(&cfg.fi, distance_m, shadow)?;

    let extra_paths = Poisson::new(4.0)
        .expect("valid Poisson mean")
        .sample(rng) as u32;
    let delay_mean = 20.0 + 0.5 * distance_m;
    let rms_delay_ns = Exp::new(1.0 / delay_mean)
        .expect("positive rate")
        .sample(rng);
    let aoa_spread_deg = rng.random_range(5.0..60.0);
    let aod_spread_deg = rng.random_range(5.0..60.0);

    let label = dataset::label(path_loss_db, &LabelRule::default())?;
    Ok(LinkSample {
        link_id,
        distance_m,
        freq_ghz: cfg.freq_ghz,
        tx_power_dbm: cfg.tx_power_dbm,
        rx_power_dbm: cfg.tx_power_dbm - path_loss_db,
        rms_delay_ns,
        num_paths: 1 + extra_paths,
        aoa_spread_deg,
        aod_spread_deg,
        path_loss_db,
        label,
    })
}

/// Sample `index` of the dataset described by `cfg`, drawn from its own substream.
pub fn gen_link_at(cfg: &ScenarioConfig, index: u64) -> Result<LinkSample> {
    let mut rng = rng::substream(cfg.seed, index);
    gen_link(&mut rng, cfg, index)
}

/// `cfg.n_samples` links in index order. Consecutive runs of `n_candidates`
/// records form one selection instance (`instance = index / n_candidates`).
pub fn gen_dataset(cfg: &ScenarioConfig) -> Result<Vec<LinkSample>> {
    cfg.validate()?;
    if cfg.n_samples == 0 {
        return Err(Error::EmptyDataset);
    }
    (0..cfg.n_samples as u64)
        .map(|i| gen_link_at(cfg, i))
        .collect()
}

/// A mobility trace: `n_steps` selection instances over the same
/// `n_candidates` links, whose distances drift as a reflected Gaussian random
/// walk with per-step standard deviation `step_m`. Shadowing is redrawn at
/// every step. Row `t * n_candidates + k` is link `k` at step `t`.
pub fn gen_trajectory(cfg: &ScenarioConfig, n_steps: usize, step_m: f64) -> Result<Vec<LinkSample>> {
    cfg.validate()?;
    if n_steps == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(step_m >= 0.0) {
        return Err(Error::Config(format!("step_m must be >= 0, got {step_m}")));
    }
    let mut rng = rng::seeded(cfg.seed);
    let mut distances: Vec<f64> = (0..cfg.n_candidates)
        .map(|_| cfg.d_min + (cfg.d_max - cfg.d_min) * rng.random::<f64>())
        .collect();
    let mut out = Vec::with_capacity(n_steps * cfg.n_candidates);
    for t in 0..n_steps {
        for (k, d) in distances.iter_mut().enumerate() {
            if t > 0 {
                let step = step_m * sample_shadow(&mut rng, 1.0)?;
                *d = reflect(*d + step, cfg.d_min, cfg.d_max);
            }
            let id = (t * cfg.n_candidates + k) as u64;
            out.push(link_at_distance(&mut rng, cfg, id, *d)?);
        }
    }
    Ok(out)
}

fn reflect(mut x: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let span = hi - lo;
    // fold into [lo, hi] by mirroring at both ends
    x = (x - lo).rem_euclid(2.0 * span);
    if x > span {
        x = 2.0 * span - x;
    }
    lo + x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn path_loss_hand_values() {
        let zero = FiParams { alpha: 0.0, beta: 0.0, sigma: 3.0 };
        assert_eq!(fi_path_loss(&zero, 1.0, 0.0).unwrap(), 0.0);
        let fi = FiParams { alpha: 10.0, beta: 2.0, sigma: 0.0 };
        assert!(close(fi_path_loss(&fi, 10.0, 0.0).unwrap(), 30.0, 1e-12));
        // 72 + 29.2 * log10(40) = 72 + 29.2 * 1.6020599913 = 118.780151746
        let pl = fi_path_loss(&FiParams::default(), 40.0, 0.0).unwrap();
        assert!(close(pl, 118.79, 0.01), "{pl}");
    }

    #[test]
    fn path_loss_rejects_nonpositive_distance() {
        let fi = FiParams::default();
        assert!(matches!(fi_path_loss(&fi, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(fi_path_loss(&fi, -3.0, 0.0), Err(Error::Domain(_))));
        assert!(fi_path_loss(&fi, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn shadow_degenerate_and_negative() {
        let mut r = rng::seeded(1);
        assert_eq!(sample_shadow(&mut r, 0.0).unwrap(), 0.0);
        assert!(sample_shadow(&mut r, -1.0).is_err());
    }

    #[test]
    fn shadow_consumes_two_outputs() {
        let mut a = rng::seeded(9);
        let mut b = rng::seeded(9);
        sample_shadow(&mut a, 8.0).unwrap();
        let _ = b.random::<u64>();
        let _ = b.random::<u64>();
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn shadow_moments() {
        let n = 100_000;
        let sigma = 8.0;
        let mut r = rng::seeded(2024);
        let draws: Vec<f64> = (0..n).map(|_| sample_shadow(&mut r, sigma).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((sd - sigma).abs() < 0.1, "sd {sd}");
        // tighter 4-sigma moment bounds
        let nf = n as f64;
        assert!(mean.abs() < 4.0 * sigma / nf.sqrt());
        assert!((sd - sigma).abs() < 4.0 * sigma / (2.0 * nf).sqrt());
    }

    #[test]
    fn fixed_distance_no_shadow_gives_constant_loss() {
        let cfg = ScenarioConfig {
            d_min: 10.0,
            d_max: 10.0,
            n_samples: 50,
            fi: FiParams { sigma: 0.0, ..FiParams::default() },
            ..ScenarioConfig::default()
        };
        let ds = gen_dataset(&cfg).unwrap();
        let first = ds[0].path_loss_db;
        assert!(ds.iter().all(|s| s.path_loss_db == first));
    }

    #[test]
    fn generated_sample_invariants() {
        let cfg = ScenarioConfig { n_samples: 2000, ..ScenarioConfig::default() };
        let ds = gen_dataset(&cfg).unwrap();
        assert_eq!(ds.len(), 2000);
        for (i, s) in ds.iter().enumerate() {
            assert_eq!(s.link_id, i as u64);
            assert!(s.distance_m >= cfg.d_min && s.distance_m <= cfg.d_max);
            assert!(s.num_paths >= 1);
            assert!(s.rms_delay_ns >= 0.0);
            assert_eq!(s.rx_power_dbm + s.path_loss_db, s.tx_power_dbm);
            assert!(s.label <= 1);
        }
    }

    #[test]
    fn both_classes_present_at_default_scale() {
        let cfg = ScenarioConfig { n_samples: 10_000, ..ScenarioConfig::default() };
        let ds = gen_dataset(&cfg).unwrap();
        let ones = ds.iter().filter(|s| s.label == 1).count();
        assert!(ones > 0 && ones < ds.len());
    }

    #[test]
    fn generation_is_deterministic_and_index_addressable() {
        let cfg = ScenarioConfig { n_samples: 100, ..ScenarioConfig::default() };
        let a = gen_dataset(&cfg).unwrap();
        let b = gen_dataset(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(gen_link_at(&cfg, 57).unwrap(), a[57]);
    }

    #[test]
    fn empty_and_invalid_configs() {
        let cfg = ScenarioConfig { n_samples: 0, ..ScenarioConfig::default() };
        assert!(matches!(gen_dataset(&cfg), Err(Error::EmptyDataset)));
        let cfg = ScenarioConfig { d_min: 0.0, ..ScenarioConfig::default() };
        assert!(gen_dataset(&cfg).is_err());
        let cfg = ScenarioConfig { d_min: 5.0, d_max: 4.0, ..ScenarioConfig::default() };
        assert!(gen_dataset(&cfg).is_err());
        let cfg = ScenarioConfig { n_samples: 1, ..ScenarioConfig::default() };
        assert_eq!(gen_dataset(&cfg).unwrap().len(), 1);
    }

    #[test]
    fn trajectory_stays_in_bounds_and_groups() {
        let cfg = ScenarioConfig { n_candidates: 3, ..ScenarioConfig::default() };
        let tr = gen_trajectory(&cfg, 200, 2.0).unwrap();
        assert_eq!(tr.len(), 600);
        assert!(tr.iter().all(|s| s.distance_m >= 1.0 && s.distance_m <= 40.0));
        assert_eq!(tr, gen_trajectory(&cfg, 200, 2.0).unwrap());
    }

    #[test]
    fn reflect_folds() {
        assert_eq!(reflect(5.0, 0.0, 10.0), 5.0);
        assert!((reflect(12.0, 0.0, 10.0) - 8.0).abs() < 1e-12);
        assert!((reflect(-3.0, 0.0, 10.0) - 3.0).abs() < 1e-12);
    }
}
