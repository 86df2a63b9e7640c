//! Labelling, splitting, normalization and CSV persistence of link datasets.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channelsim::LinkSample;
use crate::error::{Error, Result};
use crate::rng;

/// Column order of the dataset CSV.
pub const CSV_COLUMNS: [&str; 11] = [
    "link_id",
    "distance_m",
    "freq_ghz",
    "tx_power_dbm",
    "rx_power_dbm",
    "rms_delay_ns",
    "num_paths",
    "aoa_spread_deg",
    "aod_spread_deg",
    "path_loss_db",
    "label",
];

/// Strong/weak threshold on path loss. Class 1 iff `path_loss_db < threshold_db`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelRule {
    pub threshold_db: f64,
}

impl Default for LabelRule {
    fn default() -> Self {
        LabelRule { threshold_db: 120.0 }
    }
}

impl LabelRule {
    pub fn new(threshold_db: f64) -> Result<Self> {
        if !threshold_db.is_finite() {
            return Err(Error::Config(format!(
                "threshold_db must be finite, got {threshold_db}"
            )));
        }
        Ok(LabelRule { threshold_db })
    }
}

pub fn label(path_loss_db: f64, rule: &LabelRule) -> Result<u8> {
    if path_loss_db.is_nan() {
        return Err(Error::Domain("path loss is NaN".into()));
    }
    Ok(u8::from(path_loss_db < rule.threshold_db))
}

/// A numeric column usable as a learning feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    DistanceM,
    FreqGhz,
    TxPowerDbm,
    RxPowerDbm,
    RmsDelayNs,
    NumPaths,
    AoaSpreadDeg,
    AodSpreadDeg,
    PathLossDb,
}

impl Feature {
    pub const ALL: [Feature; 9] = [
        Feature::DistanceM,
        Feature::FreqGhz,
        Feature::TxPowerDbm,
        Feature::RxPowerDbm,
        Feature::RmsDelayNs,
        Feature::NumPaths,
        Feature::AoaSpreadDeg,
        Feature::AodSpreadDeg,
        Feature::PathLossDb,
    ];

    /// Path loss is left out: it determines the label.
    pub const DEFAULT: [Feature; 6] = [
        Feature::DistanceM,
        Feature::RxPowerDbm,
        Feature::RmsDelayNs,
        Feature::NumPaths,
        Feature::AoaSpreadDeg,
        Feature::AodSpreadDeg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::DistanceM => "distance_m",
            Feature::FreqGhz => "freq_ghz",
            Feature::TxPowerDbm => "tx_power_dbm",
            Feature::RxPowerDbm => "rx_power_dbm",
            Feature::RmsDelayNs => "rms_delay_ns",
            Feature::NumPaths => "num_paths",
            Feature::AoaSpreadDeg => "aoa_spread_deg",
            Feature::AodSpreadDeg => "aod_spread_deg",
            Feature::PathLossDb => "path_loss_db",
        }
    }

    pub fn value(self, s: &LinkSample) -> f64 {
        match self {
            Feature::DistanceM => s.distance_m,
            Feature::FreqGhz => s.freq_ghz,
            Feature::TxPowerDbm => s.tx_power_dbm,
            Feature::RxPowerDbm => s.rx_power_dbm,
            Feature::RmsDelayNs => s.rms_delay_ns,
            Feature::NumPaths => f64::from(s.num_paths),
            Feature::AoaSpreadDeg => s.aoa_spread_deg,
            Feature::AodSpreadDeg => s.aod_spread_deg,
            Feature::PathLossDb => s.path_loss_db,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Schema(format!("unknown feature '{s}'")))
    }
}

/// Dense row-major matrix of feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(FeatureMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Link samples plus the ordered list of columns used for learning.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<LinkSample>,
    features: Vec<Feature>,
}

impl Dataset {
    pub fn new(samples: Vec<LinkSample>, features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Schema("feature list is empty".into()));
        }
        if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.label > 1) {
            return Err(Error::Data(format!(
                "sample {i} has label {} outside {{0,1}}",
                s.label
            )));
        }
        Ok(Dataset { samples, features })
    }

    pub fn with_default_features(samples: Vec<LinkSample>) -> Result<Self> {
        Self::new(samples, Feature::DEFAULT.to_vec())
    }

    pub fn samples(&self) -> &[LinkSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<LinkSample> {
        self.samples
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Raw (unnormalized) feature values.
    pub fn feature_matrix(&self) -> FeatureMatrix {
        let data = self
            .samples
            .iter()
            .flat_map(|s| self.features.iter().map(move |f| f.value(s)))
            .collect();
        FeatureMatrix {
            rows: self.samples.len(),
            cols: self.features.len(),
            data,
        }
    }

    /// Re-derives every label from its path loss.
    pub fn relabel(&mut self, rule: &LabelRule) -> Result<()> {
        for s in &mut self.samples {
            s.label = label(s.path_loss_db, rule)?;
        }
        Ok(())
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            features: self.features.clone(),
        }
    }

    /// Content fingerprint (SHA-256 over every field's bit pattern), hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.samples {
            h.update(s.link_id.to_le_bytes());
            for v in [
                s.distance_m,
                s.freq_ghz,
                s.tx_power_dbm,
                s.rx_power_dbm,
                s.rms_delay_ns,
                s.aoa_spread_deg,
                s.aod_spread_deg,
                s.path_loss_db,
            ] {
                h.update(v.to_bits().to_le_bytes());
            }
            h.update(s.num_paths.to_le_bytes());
            h.update([s.label]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Train/test index partition of `n` items: a seeded shuffle, then the first
/// `round_ties_even(n * train_fraction)` indices go to training.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let n_train = (n as f64 * train_fraction).round_ties_even() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Data(format!(
            "splitting {n} samples at {train_fraction} leaves one side empty"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng::seeded(seed));
    let test = perm.split_off(n_train);
    Ok((perm, test))
}

pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (tr, te) = split_indices(ds.len(), train_fraction, seed)?;
    Ok((ds.subset(&tr), ds.subset(&te)))
}

/// Per-feature standardization statistics from a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    /// Population standard deviation; zero-variance columns store 1.
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        let n = x.rows() as f64;
        let mut mean = Vec::with_capacity(x.cols());
        let mut std = Vec::with_capacity(x.cols());
        for j in 0..x.cols() {
            let m = x.column(j).sum::<f64>() / n;
            let var = x.column(j).map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            let sd = var.sqrt();
            mean.push(m);
            std.push(if sd > 1e-12 * m.abs().max(1.0) { sd } else { 1.0 });
        }
        Ok(Normalizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_row(&self, row: &[f64], out: &mut [f64]) {
        for (((o, &x), m), s) in out.iter_mut().zip(row).zip(&self.mean).zip(&self.std) {
            *o = (x - m) / s;
        }
    }

    pub fn apply(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.cols(),
            });
        }
        let mut data = vec![0.0; x.data.len()];
        for (out, row) in data.chunks_mut(x.cols().max(1)).zip(x.iter_rows()) {
            self.apply_row(row, out);
        }
        if x.cols() == 0 {
            data.clear();
        }
        FeatureMatrix::new(x.rows(), x.cols(), data)
    }

    pub fn invert_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((z, m), s)| m + s * z)
            .collect()
    }
}

pub fn fit_normalizer(train: &Dataset) -> Result<Normalizer> {
    Normalizer::fit(&train.feature_matrix())
}

pub fn apply_normalizer(nz: &Normalizer, ds: &Dataset) -> Result<FeatureMatrix> {
    nz.apply(&ds.feature_matrix())
}

pub fn write_csv_to<W: Write>(samples: &[LinkSample], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let map = |e: csv::Error| Error::Data(e.to_string());
    wr.write_record(CSV_COLUMNS).map_err(map)?;
    for s in samples {
        wr.write_record([
            s.link_id.to_string(),
            s.distance_m.to_string(),
            s.freq_ghz.to_string(),
            s.tx_power_dbm.to_string(),
            s.rx_power_dbm.to_string(),
            s.rms_delay_ns.to_string(),
            s.num_paths.to_string(),
            s.aoa_spread_deg.to_string(),
            s.aod_spread_deg.to_string(),
            s.path_loss_db.to_string(),
            s.label.to_string(),
        ])
        .map_err(map)?;
    }
    wr.flush().map_err(|e| Error::Data(e.to_string()))?;
    Ok(())
}

pub fn write_csv(samples: &[LinkSample], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to(samples, &mut buf)?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Parses the dataset CSV. Columns are located by header name; all of
/// [`CSV_COLUMNS`] must be present. Row numbers in errors count the header as row 1.
pub fn read_csv_from<R: Read>(r: R) -> Result<Vec<LinkSample>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rd
        .headers()
        .map_err(|e| Error::Parse { row: 1, message: e.to_string() })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Parse { row: 1, message: "missing header".into() });
    }
    let mut idx = [0usize; 11];
    for (slot, name) in idx.iter_mut().zip(CSV_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse {
                row: 1,
                message: format!("missing column '{name}'"),
            })?;
    }

    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::Parse { row, message: e.to_string() })?;
        let field = |c: usize| -> Result<&str> {
            rec.get(idx[c]).map(str::trim).ok_or_else(|| Error::Parse {
                row,
                message: format!("missing value for '{}'", CSV_COLUMNS[c]),
            })
        };
        let num = |c: usize| -> Result<f64> {
            let s = field(c)?;
            s.parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("'{}' is not a number: '{s}'", CSV_COLUMNS[c]),
            })
        };
        let int = |c: usize| -> Result<u64> {
            let s = field(c)?;
            s.parse::<u64>().map_err(|_| Error::Parse {
                row,
                message: format!("'{}' is not a non-negative integer: '{s}'", CSV_COLUMNS[c]),
            })
        };
        let label = match field(10)? {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    row,
                    message: format!("label must be 0 or 1, got '{other}'"),
                })
            }
        };
        let num_paths = u32::try_from(int(6)?).map_err(|_| Error::Parse {
            row,
            message: "num_paths out of range".into(),
        })?;
        out.push(LinkSample {
            link_id: int(0)?,
            distance_m: num(1)?,
            freq_ghz: num(2)?,
            tx_power_dbm: num(3)?,
            rx_power_dbm: num(4)?,
            rms_delay_ns: num(5)?,
            num_paths,
            aoa_spread_deg: num(7)?,
            aod_spread_deg: num(8)?,
            path_loss_db: num(9)?,
            label,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse { row: 2, message: "no data rows".into() });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<LinkSample>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(std::io::BufReader::new(file))
}
