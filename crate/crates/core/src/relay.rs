//! Relay selection and threshold-triggered handover driven by a link classifier.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channelsim::LinkSample;
use crate::dataset::LabelRule;
use crate::error::{Error, Result};
use crate::model::Classifier;

/// The candidate links of one selection instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub instance_id: u64,
    pub links: Vec<LinkSample>,
}

impl CandidateSet {
    pub fn new(instance_id: u64, links: Vec<LinkSample>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::Data(format!("instance {instance_id} has no links")));
        }
        let (f, t) = (links[0].freq_ghz, links[0].tx_power_dbm);
        if links.iter().any(|l| l.freq_ghz != f || l.tx_power_dbm != t) {
            return Err(Error::Data(format!(
                "instance {instance_id} mixes scenario parameters"
            )));
        }
        Ok(CandidateSet { instance_id, links })
    }
}

/// Groups rows into selection instances by `link_id / n_candidates`. Every
/// instance must be contiguous and hold exactly `n_candidates` links.
pub fn group_instances(samples: &[LinkSample], n_candidates: usize) -> Result<Vec<CandidateSet>> {
    if n_candidates == 0 {
        return Err(Error::Config("n_candidates must be >= 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = n_candidates as u64;
    let mut out: Vec<CandidateSet> = Vec::new();
    for s in samples {
        let id = s.link_id / k;
        match out.last_mut() {
            Some(cs) if cs.instance_id == id => cs.links.push(s.clone()),
            _ => {
                if out.iter().any(|cs| cs.instance_id == id) {
                    return Err(Error::Data(format!("instance {id} is not contiguous")));
                }
                out.push(CandidateSet {
                    instance_id: id,
                    links: vec![s.clone()],
                });
            }
        }
    }
    for cs in &out {
        if cs.links.len() != n_candidates {
            return Err(Error::Data(format!(
                "instance {} has {} links, expected {n_candidates}",
                cs.instance_id,
                cs.links.len()
            )));
        }
    }
    out.into_iter()
        .map(|cs| CandidateSet::new(cs.instance_id, cs.links))
        .collect()
}

/// Index of the minimum true path loss; ties go to the lowest index.
pub fn select_oracle(cs: &CandidateSet) -> usize {
    let mut best = 0;
    for (i, l) in cs.links.iter().enumerate().skip(1) {
        if l.path_loss_db < cs.links[best].path_loss_db {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayDecision {
    pub instance_id: u64,
    pub chosen_index: usize,
    /// Predicted class of the chosen link; 0 means every candidate looked weak.
    pub chosen_class: u8,
    pub scores: Vec<f64>,
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Picks the link with the highest predicted score (ties to the lowest index).
pub fn select_predicted<C: Classifier + ?Sized>(model: &C, cs: &CandidateSet) -> Result<RelayDecision> {
    let scores = model.scores(&cs.links)?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("model produced a NaN score".into()));
    }
    let chosen_index = argmax(&scores);
    Ok(RelayDecision {
        instance_id: cs.instance_id,
        chosen_index,
        chosen_class: model.class_of(scores[chosen_index]),
        scores,
    })
}

/// Fraction of instances where the predicted choice equals the true best link.
pub fn selection_accuracy<C: Classifier + ?Sized>(model: &C, instances: &[CandidateSet]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for cs in instances {
        if select_predicted(model, cs)?.chosen_index == select_oracle(cs) {
            hits += 1;
        }
    }
    Ok(hits as f64 / instances.len() as f64)
}

/// Wilson score interval for `hits / n` at `z` standard errors (1.96 for 95%).
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverStep {
    pub time_index: usize,
    pub chosen_index: usize,
    pub chosen_pl_db: f64,
    pub in_outage: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverTrace {
    pub steps: Vec<HandoverStep>,
    pub switch_count: usize,
    pub outage_fraction: f64,
}

impl HandoverTrace {
    fn from_steps(steps: Vec<HandoverStep>) -> Self {
        let switch_count = steps
            .windows(2)
            .filter(|w| w[0].chosen_index != w[1].chosen_index)
            .count();
        let outages = steps.iter().filter(|s| s.in_outage).count();
        let outage_fraction = if steps.is_empty() {
            0.0
        } else {
            outages as f64 / steps.len() as f64
        };
        HandoverTrace {
            steps,
            switch_count,
            outage_fraction,
        }
    }

    /// `time_index,chosen_index,chosen_pl_db,in_outage`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_index,chosen_index,chosen_pl_db,in_outage\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.time_index,
                s.chosen_index,
                s.chosen_pl_db,
                u8::from(s.in_outage)
            );
        }
        out
    }
}

/// Score margin a challenger needs over the incumbent under `hysteresis_db`:
/// `1 - 10^(-hysteresis_db / 10)`, the fraction of power a hysteresis of that
/// many dB discounts. Zero when hysteresis is off.
pub fn hysteresis_margin(hysteresis_db: f64) -> f64 {
    if hysteresis_db <= 0.0 {
        0.0
    } else {
        1.0 - 10f64.powf(-hysteresis_db / 10.0)
    }
}

/// Stay on the serving link while it is predicted strong; otherwise move to
/// the best-scoring candidate. With hysteresis, the move also needs the
/// challenger to beat the incumbent's score by [`hysteresis_margin`].
pub fn handover_sim<C: Classifier + ?Sized>(
    model: &C,
    trajectory: &[CandidateSet],
    rule: &LabelRule,
    hysteresis_db: f64,
) -> Result<HandoverTrace> {
    if trajectory.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(hysteresis_db >= 0.0) {
        return Err(Error::Config(format!("hysteresis_db must be >= 0, got {hysteresis_db}")));
    }
    let margin = hysteresis_margin(hysteresis_db);
    let mut steps = Vec::with_capacity(trajectory.len());
    let mut current: Option<usize> = None;
    for (t, cs) in trajectory.iter().enumerate() {
        let decision = select_predicted(model, cs)?;
        let chosen = match current {
            Some(c) if c < cs.links.len() => {
                let incumbent = decision.scores[c];
                if model.class_of(incumbent) == 1 {
                    c
                } else if decision.scores[decision.chosen_index] > incumbent + margin
                    || (margin == 0.0 && decision.chosen_index != c)
                {
                    decision.chosen_index
                } else {
                    c
                }
            }
            _ => decision.chosen_index,
        };
        current = Some(chosen);
        let pl = cs.links[chosen].path_loss_db;
        steps.push(HandoverStep {
            time_index: t,
            chosen_index: chosen,
            chosen_pl_db: pl,
            in_outage: pl >= rule.threshold_db,
        });
    }
    Ok(HandoverTrace::from_steps(steps))
}
