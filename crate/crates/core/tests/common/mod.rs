//! Independent oracles shared by the integration tests. Nothing here calls the
//! library code it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaylearn::channelsim::{gen_dataset, LinkSample, ScenarioConfig};
use relaylearn::dataset::{split, Dataset};
use relaylearn::mlp::{Activation, Mlp};

/// Defaults, n = 10000, seed 42, 75/25 split under seed 42.
pub fn standard_split() -> (Dataset, Dataset) {
    let samples = gen_dataset(&ScenarioConfig::default()).expect("generate");
    let ds = Dataset::with_default_features(samples).expect("dataset");
    split(&ds, 0.75, 42).expect("split")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A link with every field set from one scalar, for constructed datasets.
pub fn link(id: u64, distance_m: f64, rms_delay_ns: f64, label: u8) -> LinkSample {
    LinkSample {
        link_id: id,
        distance_m,
        freq_ghz: 28.0,
        tx_power_dbm: 30.0,
        rx_power_dbm: -80.0,
        rms_delay_ns,
        num_paths: 3,
        aoa_spread_deg: 10.0,
        aod_spread_deg: 10.0,
        path_loss_db: 110.0,
        label,
    }
}

// ---------------------------------------------------------------------------
// Network oracle: a plain re-implementation of the forward pass and loss.

struct NaiveLayer {
    fan_in: usize,
    fan_out: usize,
    w: Vec<f64>,
    b: Vec<f64>,
    relu: bool,
}

pub struct NaiveNet {
    layers: Vec<NaiveLayer>,
}

impl NaiveNet {
    pub fn from_mlp(net: &Mlp) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| NaiveLayer {
                fan_in: l.fan_in(),
                fan_out: l.fan_out(),
                w: l.weights().to_vec(),
                b: l.biases().to_vec(),
                relu: l.activation() == Activation::Relu,
            })
            .collect();
        NaiveNet { layers }
    }

    /// Output logit and every hidden pre-activation.
    pub fn logit(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut a = x.to_vec();
        let mut hidden_z = Vec::new();
        let last = self.layers.len() - 1;
        for (k, l) in self.layers.iter().enumerate() {
            let mut next = vec![0.0; l.fan_out];
            for j in 0..l.fan_out {
                let mut z = l.b[j];
                for i in 0..l.fan_in {
                    z += l.w[j * l.fan_in + i] * a[i];
                }
                if k == last {
                    next[j] = z;
                } else {
                    hidden_z.push(z);
                    next[j] = if l.relu { z.max(0.0) } else { z };
                }
            }
            a = next;
        }
        (a[0], hidden_z)
    }

    /// Mean BCE written in logit form, `softplus(z) - y z`, so it is exact
    /// even where the probability saturates.
    pub fn mean_loss(&self, rows: &[Vec<f64>], labels: &[u8]) -> f64 {
        let total: f64 = rows
            .iter()
            .zip(labels)
            .map(|(x, &y)| {
                let z = self.logit(x).0;
                z.max(0.0) + (-z.abs()).exp().ln_1p() - f64::from(y) * z
            })
            .sum();
        total / rows.len() as f64
    }

    /// Smallest |pre-activation| over all hidden units and rows.
    pub fn min_hidden_margin(&self, rows: &[Vec<f64>]) -> f64 {
        rows.iter()
            .flat_map(|x| self.logit(x).1)
            .map(f64::abs)
            .fold(f64::INFINITY, f64::min)
    }

    /// Central differences; per layer, weights then biases.
    pub fn fd_gradients(&mut self, rows: &[Vec<f64>], labels: &[u8], h: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for k in 0..self.layers.len() {
            let mut g = Vec::new();
            let nw = self.layers[k].w.len();
            let nb = self.layers[k].b.len();
            for idx in 0..nw + nb {
                let orig = self.param(k, idx);
                self.set_param(k, idx, orig + h);
                let up = self.mean_loss(rows, labels);
                self.set_param(k, idx, orig - h);
                let down = self.mean_loss(rows, labels);
                self.set_param(k, idx, orig);
                g.push((up - down) / (2.0 * h));
            }
            out.push(g);
        }
        out
    }

    fn param(&self, k: usize, idx: usize) -> f64 {
        let l = &self.layers[k];
        if idx < l.w.len() {
            l.w[idx]
        } else {
            l.b[idx - l.w.len()]
        }
    }

    fn set_param(&mut self, k: usize, idx: usize, v: f64) {
        let l = &mut self.layers[k];
        let nw = l.w.len();
        if idx < nw {
            l.w[idx] = v;
        } else {
            l.b[idx - nw] = v;
        }
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Random rows whose hidden pre-activations all stay at least `margin` from
/// the ReLU kink, so finite differences never straddle it.
pub fn kink_free_batch(net: &NaiveNet, dim: usize, n: usize, margin: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        if net.min_hidden_margin(&rows) > margin {
            return rows;
        }
    }
}

// ---------------------------------------------------------------------------
// Metric oracles: counting by definition.

pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

pub fn count(preds: &[u8], labels: &[u8]) -> Counts {
    let mut c = Counts { tp: 0, fp: 0, tn: 0, fn_: 0 };
    for (&p, &y) in preds.iter().zip(labels) {
        match (p, y) {
            (1, 1) => c.tp += 1,
            (1, 0) => c.fp += 1,
            (0, 0) => c.tn += 1,
            _ => c.fn_ += 1,
        }
    }
    c
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn naive_precision(c: &Counts) -> f64 {
    ratio(c.tp, c.tp + c.fp)
}

pub fn naive_recall(c: &Counts) -> f64 {
    ratio(c.tp, c.tp + c.fn_)
}

pub fn naive_f1(c: &Counts) -> f64 {
    let (p, r) = (naive_precision(c), naive_recall(c));
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn naive_accuracy(c: &Counts) -> f64 {
    ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn_)
}

/// P(score of a random positive > score of a random negative), ties count 1/2.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0u64;
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != 0 {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                credit += 1.0;
            } else if scores[i] == scores[j] {
                credit += 0.5;
            }
        }
    }
    credit / pairs as f64
}

// ---------------------------------------------------------------------------
// Relay oracle.

/// Index of the smallest path loss by exhaustive scan, first on ties.
pub fn naive_argmin_pl(links: &[LinkSample]) -> usize {
    let mut best = 0;
    for i in 1..links.len() {
        if links[i].path_loss_db < links[best].path_loss_db {
            best = i;
        }
    }
    best
}
