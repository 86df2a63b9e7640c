//! The three baselines on data with a known answer: two margin-separated
//! blobs, where logistic regression and the linear SVM are perfect and the
//! dummy classifier is not, and a ring, which only the poly4 SVM separates.

use rand::Rng as _;
use relaylearn::baselines::{dummy_train, logreg_train, svm_train, FeatureMap, LogRegConfig, SvmConfig};
use relaylearn::channelsim::LinkSample;
use relaylearn::dataset::{Dataset, Feature};
use relaylearn::model::Classifier;
use relaylearn::rng;

fn point(id: u64, x: f64, y: f64, label: u8) -> LinkSample {
    LinkSample {
        link_id: id,
        distance_m: x,
        freq_ghz: 28.0,
        tx_power_dbm: 30.0,
        rx_power_dbm: 0.0,
        rms_delay_ns: y,
        num_paths: 1,
        aoa_spread_deg: 0.0,
        aod_spread_deg: 0.0,
        path_loss_db: 0.0,
        label,
    }
}

fn dataset(points: Vec<LinkSample>) -> Dataset {
    Dataset::new(points, vec![Feature::DistanceM, Feature::RmsDelayNs]).unwrap()
}

fn blobs(n: u64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    dataset(
        (0..n)
            .map(|i| {
                let c = if i % 2 == 1 { 2.0 } else { -2.0 };
                point(i, c + r.random_range(-0.35..0.35), c + r.random_range(-0.35..0.35), (i % 2) as u8)
            })
            .collect(),
    )
}

/// Inside radius 1 is class 1, the annulus 2..3 is class 0.
fn ring(n: u64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    dataset(
        (0..n)
            .map(|i| {
                let inner = i % 2 == 1;
                let rad = if inner { r.random_range(0.0..1.0) } else { r.random_range(2.0..3.0) };
                let a = r.random_range(0.0..std::f64::consts::TAU);
                point(i, rad * a.cos(), rad * a.sin(), u8::from(inner))
            })
            .collect(),
    )
}

fn accuracy(m: &dyn Classifier, test: &Dataset) -> f64 {
    let preds = m.predict(test.samples()).unwrap();
    preds.iter().zip(test.labels()).filter(|(p, y)| **p == *y).count() as f64 / test.len() as f64
}

fn main() -> relaylearn::Result<()> {
    for (name, train, test) in [("blobs", blobs(200, 1), blobs(200, 2)), ("ring", ring(400, 3), ring(400, 4))] {
        let lr = logreg_train(&train, &LogRegConfig::default())?;
        let svm = svm_train(&train, &SvmConfig::default())?;
        let poly = svm_train(&train, &SvmConfig { feature_map: FeatureMap::Poly4, ..SvmConfig::default() })?;
        let dummy = dummy_train(&train)?;
        println!(
            "{name:>5}: logreg {:.3}  svm {:.3}  svm-poly4 {:.3}  dummy {:.3}",
            accuracy(&lr, &test),
            accuracy(&svm, &test),
            accuracy(&poly, &test),
            accuracy(&dummy, &test)
        );
    }
    Ok(())
}
