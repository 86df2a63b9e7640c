//! Comparison classifiers: logistic regression, a most-frequent dummy, and a
//! primal linear SVM with an optional degree-4 polynomial feature map.
//!
//! All of them standardize features with training-split statistics, exactly
//! like the MLP, and expose raw-row scoring so they plug into the same
//! evaluation and relay code.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Feature, FeatureMatrix, Normalizer};
use crate::error::{Error, Result};
use crate::mlp::{bce_loss, sigmoid};

fn check_xy(x: &FeatureMatrix, y: &[u8]) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Weights and bias of an affine score `w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Linear {
    pub fn zeros(dim: usize) -> Self {
        Linear {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

// ---------------------------------------------------------------------------
// Logistic regression

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            learning_rate: 0.5,
            max_epochs: 2000,
            tol: 1e-7,
        }
    }
}

/// Mean BCE of `sigmoid(w . x + b)` and its gradient `(d/dw, d/db)`.
pub fn logreg_loss_grad(m: &Linear, x: &FeatureMatrix, y: &[u8]) -> (f64, Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut gw = vec![0.0; x.cols()];
    let mut gb = 0.0;
    let mut loss = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let p = sigmoid(m.decision(row));
        loss += bce_loss(p, label);
        let r = p - f64::from(label);
        gb += r;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
    }
    gw.iter_mut().for_each(|g| *g /= n);
    (loss / n, gw, gb / n)
}

/// Full-batch gradient descent from zero weights. Stops when an epoch improves
/// the loss by less than `tol`, or after `max_epochs`.
pub fn logreg_fit(x: &FeatureMatrix, y: &[u8], cfg: &LogRegConfig) -> Result<(Linear, Vec<f64>)> {
    check_xy(x, y)?;
    if !(cfg.learning_rate > 0.0) || cfg.max_epochs == 0 {
        return Err(Error::Config("logreg needs learning_rate > 0 and max_epochs >= 1".into()));
    }
    let mut m = Linear::zeros(x.cols());
    let mut history = Vec::new();
    for _ in 0..cfg.max_epochs {
        let (loss, gw, gb) = logreg_loss_grad(&m, x, y);
        if let Some(&prev) = history.last() {
            if prev - loss < cfg.tol {
                history.push(loss);
                break;
            }
        }
        history.push(loss);
        for (w, g) in m.weights.iter_mut().zip(&gw) {
            *w -= cfg.learning_rate * g;
        }
        m.bias -= cfg.learning_rate * gb;
    }
    Ok((m, history))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub features: Vec<Feature>,
    pub normalizer: Normalizer,
    pub linear: Linear,
    pub config: LogRegConfig,
    pub loss_history: Vec<f64>,
}

pub fn logreg_train(train: &Dataset, cfg: &LogRegConfig) -> Result<LogRegModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let raw = train.feature_matrix();
    let normalizer = Normalizer::fit(&raw)?;
    let x = normalizer.apply(&raw)?;
    let (linear, loss_history) = logreg_fit(&x, &train.labels(), cfg)?;
    Ok(LogRegModel {
        features: train.features().to_vec(),
        normalizer,
        linear,
        config: cfg.clone(),
        loss_history,
    })
}

impl LogRegModel {
    /// Probability of class 1 for a raw feature row.
    pub fn score_row(&self, raw: &[f64]) -> Result<f64> {
        let z = normalize(&self.normalizer, raw)?;
        Ok(sigmoid(self.linear.decision(&z)))
    }
}

fn normalize(nz: &Normalizer, raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != nz.dim() {
        return Err(Error::DimensionMismatch {
            expected: nz.dim(),
            got: raw.len(),
        });
    }
    let mut z = vec![0.0; raw.len()];
    nz.apply_row(raw, &mut z);
    Ok(z)
}

// ---------------------------------------------------------------------------
// Dummy

/// Most-frequent-class baseline. Its score is the training frequency of
/// class 1, so the 0.5 cutoff reproduces the majority vote (ties to 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DummyModel {
    pub features: Vec<Feature>,
    pub majority: u8,
    pub positive_rate: f64,
}

pub fn dummy_fit(y: &[u8]) -> Result<(u8, f64)> {
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let ones = y.iter().filter(|&&l| l == 1).count();
    let rate = ones as f64 / y.len() as f64;
    Ok((u8::from(2 * ones >= y.len()), rate))
}

pub fn dummy_train(train: &Dataset) -> Result<DummyModel> {
    let (majority, positive_rate) = dummy_fit(&train.labels())?;
    Ok(DummyModel {
        features: train.features().to_vec(),
        majority,
        positive_rate,
    })
}

impl DummyModel {
    pub fn predict(&self) -> u8 {
        self.majority
    }

    /// Training frequency of the predicted class.
    pub fn majority_frequency(&self) -> f64 {
        if self.majority == 1 {
            self.positive_rate
        } else {
            1.0 - self.positive_rate
        }
    }
}

// ---------------------------------------------------------------------------
// SVM

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMap {
    #[default]
    Identity,
    /// All monomials of total degree 1..=4.
    Poly4,
}

impl FeatureMap {
    pub fn output_dim(self, d: usize) -> usize {
        match self {
            FeatureMap::Identity => d,
            FeatureMap::Poly4 => monomials(d, 4).len(),
        }
    }

    pub fn apply(self, x: &[f64]) -> Vec<f64> {
        match self {
            FeatureMap::Identity => x.to_vec(),
            FeatureMap::Poly4 => monomials(x.len(), 4)
                .iter()
                .map(|idx| idx.iter().map(|&i| x[i]).product())
                .collect(),
        }
    }

    pub fn apply_matrix(self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        match self {
            FeatureMap::Identity => Ok(x.clone()),
            FeatureMap::Poly4 => {
                let terms = monomials(x.cols(), 4);
                let data = x
                    .iter_rows()
                    .flat_map(|r| {
                        terms
                            .iter()
                            .map(move |idx| idx.iter().map(|&i| r[i]).product::<f64>())
                    })
                    .collect();
                FeatureMatrix::new(x.rows(), terms.len(), data)
            }
        }
    }
}

/// Index multisets (non-decreasing tuples) of every monomial of degree 1..=max_degree.
fn monomials(d: usize, max_degree: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..d {
            cur.push(i);
            extend(i, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, d, max_degree, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub feature_map: FeatureMap,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            learning_rate: 0.5,
            max_epochs: 1000,
            feature_map: FeatureMap::Identity,
        }
    }
}

/// `max(0, 1 - y * score)` with `y` in {-1, +1}.
pub fn hinge_loss(y_signed: f64, score: f64) -> f64 {
    (1.0 - y_signed * score).max(0.0)
}

fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `0.5 * |w|^2 + C * mean hinge`, and one subgradient. At the hinge point
/// itself the zero subgradient is taken.
pub fn svm_objective_subgrad(m: &Linear, c: f64, x: &FeatureMatrix, y: &[u8]) -> (f64, Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut gw = vec![0.0; x.cols()];
    let mut gb = 0.0;
    let mut hinge = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let ys = signed(label);
        let margin = ys * m.decision(row);
        if margin < 1.0 {
            hinge += 1.0 - margin;
            gb -= ys;
            for (g, v) in gw.iter_mut().zip(row) {
                *g -= ys * v;
            }
        }
    }
    let k = c / n;
    for (g, w) in gw.iter_mut().zip(&m.weights) {
        *g = *g * k + w;
    }
    let reg = 0.5 * dot(&m.weights, &m.weights);
    (reg + c * hinge / n, gw, gb * k)
}

/// Deterministic full-batch subgradient descent with step
/// `lr / (1 + lr * (t - 1))`; returns the best iterate seen.
pub fn svm_fit(x: &FeatureMatrix, y: &[u8], cfg: &SvmConfig) -> Result<(Linear, Vec<f64>)> {
    check_xy(x, y)?;
    if !(cfg.c > 0.0) || !(cfg.learning_rate > 0.0) || cfg.max_epochs == 0 {
        return Err(Error::Config("svm needs c > 0, learning_rate > 0, max_epochs >= 1".into()));
    }
    let mut m = Linear::zeros(x.cols());
    let mut best = (f64::INFINITY, m.clone());
    let mut history = Vec::with_capacity(cfg.max_epochs);
    for t in 1..=cfg.max_epochs {
        let (obj, gw, gb) = svm_objective_subgrad(&m, cfg.c, x, y);
        history.push(obj);
        if obj < best.0 {
            best = (obj, m.clone());
        }
        let eta = cfg.learning_rate / (1.0 + cfg.learning_rate * (t - 1) as f64);
        for (w, g) in m.weights.iter_mut().zip(&gw) {
            *w -= eta * g;
        }
        m.bias -= eta * gb;
    }
    let (obj, _, _) = svm_objective_subgrad(&m, cfg.c, x, y);
    if obj < best.0 {
        best = (obj, m);
    }
    Ok((best.1, history))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub features: Vec<Feature>,
    pub normalizer: Normalizer,
    /// Standardizes the mapped features; absent for the identity map.
    pub mapped_normalizer: Option<Normalizer>,
    pub linear: Linear,
    pub config: SvmConfig,
    pub objective_history: Vec<f64>,
}

pub fn svm_train(train: &Dataset, cfg: &SvmConfig) -> Result<SvmModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let raw = train.feature_matrix();
    let normalizer = Normalizer::fit(&raw)?;
    let z = normalizer.apply(&raw)?;
    let (x, mapped_normalizer) = match cfg.feature_map {
        FeatureMap::Identity => (z, None),
        map => {
            let phi = map.apply_matrix(&z)?;
            let nz = Normalizer::fit(&phi)?;
            (nz.apply(&phi)?, Some(nz))
        }
    };
    let (linear, objective_history) = svm_fit(&x, &train.labels(), cfg)?;
    Ok(SvmModel {
        features: train.features().to_vec(),
        normalizer,
        mapped_normalizer,
        linear,
        config: cfg.clone(),
        objective_history,
    })
}

impl SvmModel {
    /// Signed margin for a raw feature row.
    pub fn score_row(&self, raw: &[f64]) -> Result<f64> {
        let z = normalize(&self.normalizer, raw)?;
        let phi = self.config.feature_map.apply(&z);
        let phi = match &self.mapped_normalizer {
            Some(nz) => normalize(nz, &phi)?,
            None => phi,
        };
        if phi.len() != self.linear.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.linear.weights.len(),
                got: phi.len(),
            });
        }
        Ok(self.linear.decision(&phi))
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use rand::Rng as _;

    use crate::rng;

    fn one_d_separable() -> (FeatureMatrix, Vec<u8>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let mag = 1.0 + i as f64 * 0.05;
            rows.push(vec![-mag]);
            y.push(0);
            rows.push(vec![mag]);
            y.push(1);
        }
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    fn accuracy(scores: impl Iterator<Item = f64>, cutoff: f64, y: &[u8]) -> f64 {
        let hits = scores
            .zip(y)
            .filter(|(s, &l)| u8::from(*s >= cutoff) == l)
            .count();
        hits as f64 / y.len() as f64
    }

    #[test]
    fn logreg_starts_at_half_and_separates() {
        assert_eq!(sigmoid(Linear::zeros(3).decision(&[1.0, -2.0, 5.0])), 0.5);
        let (x, y) = one_d_separable();
        let (m, hist) = logreg_fit(&x, &y, &LogRegConfig::default()).unwrap();
        assert!((hist[0] - std::f64::consts::LN_2).abs() < 1e-12);
        let acc = accuracy(x.iter_rows().map(|r| sigmoid(m.decision(r))), 0.5, &y);
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn logreg_gradient_matches_finite_difference() {
        let mut r = rng::seeded(31);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<u8> = (0..30).map(|_| r.random_range(0..2)).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let m = Linear {
            weights: vec![0.3, -0.7, 1.1],
            bias: 0.2,
        };
        let (_, gw, gb) = logreg_loss_grad(&m, &x, &y);
        let h = 1e-6;
        for j in 0..3 {
            let mut plus = m.clone();
            plus.weights[j] += h;
            let mut minus = m.clone();
            minus.weights[j] -= h;
            let fd = (logreg_loss_grad(&plus, &x, &y).0 - logreg_loss_grad(&minus, &x, &y).0) / (2.0 * h);
            assert!((fd - gw[j]).abs() / gw[j].abs().max(1e-8) < 1e-6, "{fd} vs {}", gw[j]);
        }
        let mut plus = m.clone();
        plus.bias += h;
        let mut minus = m.clone();
        minus.bias -= h;
        let fd = (logreg_loss_grad(&plus, &x, &y).0 - logreg_loss_grad(&minus, &x, &y).0) / (2.0 * h);
        assert!((fd - gb).abs() / gb.abs().max(1e-8) < 1e-6);
    }

    #[test]
    fn logreg_without_features_learns_base_rate() {
        let y: Vec<u8> = (0..100).map(|i| u8::from(i % 10 < 3)).collect();
        let x = FeatureMatrix::new(100, 0, vec![]).unwrap();
        let (m, _) = logreg_fit(&x, &y, &LogRegConfig::default()).unwrap();
        assert!((sigmoid(m.bias) - 0.3).abs() < 1e-3, "{}", sigmoid(m.bias));
    }

    #[test]
    fn logreg_rejects_empty() {
        let x = FeatureMatrix::new(0, 2, vec![]).unwrap();
        assert!(matches!(logreg_fit(&x, &[], &LogRegConfig::default()), Err(Error::EmptyDataset)));
        assert!(svm_fit(&x, &[], &SvmConfig::default()).is_err());
        assert!(dummy_fit(&[]).is_err());
    }

    #[test]
    fn dummy_majority_and_ties() {
        let y: Vec<u8> = (0..10).map(|i| u8::from(i < 6)).collect();
        assert_eq!(dummy_fit(&y).unwrap(), (1, 0.6));
        assert_eq!(dummy_fit(&[1, 1, 1]).unwrap().0, 1);
        assert_eq!(dummy_fit(&[0, 1, 0, 1]).unwrap().0, 1);
        let (maj, rate) = dummy_fit(&[0, 0, 0, 1]).unwrap();
        assert_eq!(maj, 0);
        assert_eq!(u8::from(rate >= 0.5), maj);
    }

    #[test]
    fn hinge_values() {
        assert_eq!(hinge_loss(1.0, 2.0), 0.0);
        assert_eq!(hinge_loss(-1.0, -2.0), 0.0);
        assert_eq!(hinge_loss(1.0, -1.0), 2.0);
        assert_eq!(hinge_loss(1.0, 1.0), 0.0);
    }

    #[test]
    fn svm_subgradient_matches_finite_difference_off_hinge() {
        let mut r = rng::seeded(77);
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|_| (0..2).map(|_| r.random_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<u8> = (0..25).map(|_| r.random_range(0..2)).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let m = Linear {
            weights: vec![0.4, -0.9],
            bias: 0.1,
        };
        for (row, &l) in x.iter_rows().zip(&y) {
            let margin = signed(l) * m.decision(row);
            assert!((1.0 - margin).abs() > 1e-3);
        }
        let (_, gw, gb) = svm_objective_subgrad(&m, 1.0, &x, &y);
        let h = 1e-7;
        for j in 0..2 {
            let mut p = m.clone();
            p.weights[j] += h;
            let mut q = m.clone();
            q.weights[j] -= h;
            let fd = (svm_objective_subgrad(&p, 1.0, &x, &y).0 - svm_objective_subgrad(&q, 1.0, &x, &y).0) / (2.0 * h);
            assert!((fd - gw[j]).abs() / gw[j].abs().max(1e-8) < 1e-5);
        }
        let mut p = m.clone();
        p.bias += h;
        let mut q = m.clone();
        q.bias -= h;
        let fd = (svm_objective_subgrad(&p, 1.0, &x, &y).0 - svm_objective_subgrad(&q, 1.0, &x, &y).0) / (2.0 * h);
        assert!((fd - gb).abs() / gb.abs().max(1e-8) < 1e-5);
    }

    #[test]
    fn svm_separates_blobs() {
        let mut r = rng::seeded(13);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..200 {
            let (c, l) = if i % 2 == 0 { (2.0, 1) } else { (-2.0, 0) };
            let ang: f64 = r.random_range(0.0..std::f64::consts::TAU);
            let rad: f64 = 0.5 * r.random::<f64>().sqrt();
            rows.push(vec![c + rad * ang.cos(), c + rad * ang.sin()]);
            y.push(l);
        }
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let (m, _) = svm_fit(&x, &y, &SvmConfig::default()).unwrap();
        assert_eq!(accuracy(x.iter_rows().map(|r| m.decision(r)), 0.0, &y), 1.0);
    }

    #[test]
    fn poly4_expansion() {
        assert_eq!(FeatureMap::Poly4.output_dim(1), 4);
        assert_eq!(FeatureMap::Poly4.output_dim(2), 14);
        // C(6 + 4, 4) - 1
        assert_eq!(FeatureMap::Poly4.output_dim(6), 209);
        let phi = FeatureMap::Poly4.apply(&[2.0]);
        assert_eq!(phi, vec![2.0, 4.0, 8.0, 16.0]);
        let phi = FeatureMap::Poly4.apply(&[2.0, 3.0]);
        assert_eq!(&phi[..5], &[2.0, 3.0, 4.0, 6.0, 9.0]);
        assert_eq!(FeatureMap::Identity.apply(&[1.0, 2.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn poly4_svm_solves_a_ring() {
        // class 1 inside the unit circle, class 0 in a ring outside radius 1.5
        let mut r = rng::seeded(5);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..300 {
            let ang: f64 = r.random_range(0.0..std::f64::consts::TAU);
            let (rad, l) = if i % 2 == 0 {
                (r.random_range(0.0..0.8), 1)
            } else {
                (r.random_range(1.6..2.2), 0)
            };
            rows.push(vec![rad * ang.cos(), rad * ang.sin()]);
            y.push(l);
        }
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let phi = FeatureMap::Poly4.apply_matrix(&x).unwrap();
        let nz = Normalizer::fit(&phi).unwrap();
        let phi = nz.apply(&phi).unwrap();
        let (m, _) = svm_fit(&phi, &y, &SvmConfig { feature_map: FeatureMap::Poly4, ..Default::default() }).unwrap();
        assert!(accuracy(phi.iter_rows().map(|r| m.decision(r)), 0.0, &y) >= 0.99);
        let (lin, _) = svm_fit(&x, &y, &SvmConfig::default()).unwrap();
        assert!(accuracy(x.iter_rows().map(|r| lin.decision(r)), 0.0, &y) < 0.9);
    }
}
