//! Signal sequences, poison-accuracy measurement, and the per-round metrics
//! log with its CSV rendering.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::data::SignatureImage;
use crate::error::{Error, Result};
use crate::nn::{forward_classify, ModelParams};
use crate::rng;

/// Detection-phase probe set for one signature: the image itself plus 24
/// seeded pixel-jitter variants, all sharing the pseudo-label. A single
/// image gives one Bernoulli observation per round, which is far too coarse
/// at desk scale; 25 probes resolve duty-cycle differences of a few percent,
/// which is what separates mid distances.
pub fn signature_probes(sig: &SignatureImage, seed: u64) -> Vec<(Vec<f64>, usize)> {
    let mut probes = vec![(sig.pixels.clone(), sig.pseudo_label)];
    for variant in 0..24u64 {
        let mut r = rng::stream(seed, "sim.probe_jitter", &[sig.owner as u64, variant]);
        let jittered: Vec<f64> = sig
            .pixels
            .iter()
            .map(|&p| (p + r.gen_range(-0.1..0.1)).clamp(0.0, 1.0))
            .collect();
        probes.push((jittered, sig.pseudo_label));
    }
    probes
}

/// Fraction of probes the model classifies as their target label.
pub fn measure_poison_accuracy(
    params: &ModelParams,
    probes: &[(Vec<f64>, usize)],
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::invalid("measure_poison_accuracy: empty probe list"));
    }
    let mut hits = 0usize;
    for (pixels, target) in probes {
        let p = forward_classify(params, pixels)?;
        let pred = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if pred == *target {
            hits += 1;
        }
    }
    Ok(hits as f64 / probes.len() as f64)
}

/// Poison-accuracy sequences for every (signature owner, observer) pair,
/// one value per detection round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignalSet {
    map: BTreeMap<(usize, usize), Vec<f64>>,
}

impl SignalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, owner: usize, observer: usize, value: f64) {
        self.map.entry((owner, observer)).or_default().push(value);
    }

    pub fn get(&self, owner: usize, observer: usize) -> Option<&[f64]> {
        self.map.get(&(owner, observer)).map(|v| v.as_slice())
    }

    pub fn owners(&self) -> BTreeSet<usize> {
        self.map.keys().map(|&(o, _)| o).collect()
    }

    pub fn observers_of(&self, owner: usize) -> BTreeSet<usize> {
        self.map
            .keys()
            .filter(|&&(o, _)| o == owner)
            .map(|&(_, obs)| obs)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Mean signal strength of `owner`'s signature at `observer`.
    pub fn mean(&self, owner: usize, observer: usize) -> Option<f64> {
        self.get(owner, observer)
            .filter(|v| !v.is_empty())
            .map(crate::stats::mean)
    }

    /// The regressor input for the ordered pair: the owner's self-observed
    /// sequence minus the observer's sequence, elementwise.
    pub fn difference(&self, owner: usize, observer: usize) -> Result<Vec<f64>> {
        let own = self.get(owner, owner).ok_or_else(|| {
            Error::invalid(format!("missing sequence for pair ({owner}, {owner})"))
        })?;
        let theirs = self.get(owner, observer).ok_or_else(|| {
            Error::invalid(format!("missing sequence for pair ({owner}, {observer})"))
        })?;
        if own.len() != theirs.len() {
            return Err(Error::invalid(format!(
                "sequence length mismatch for pair ({owner}, {observer}): {} vs {}",
                own.len(),
                theirs.len()
            )));
        }
        Ok(own.iter().zip(theirs).map(|(a, b)| a - b).collect())
    }
}

/// One metrics row; `None` renders as an empty CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub round: usize,
    pub client: usize,
    pub main_acc: Option<f64>,
    pub loss: Option<f64>,
    /// Parallel to `MetricsLog::sig_owners`.
    pub poison_acc: Vec<Option<f64>>,
    pub asr: Option<f64>,
}

/// Append-only per-round, per-client metrics, rendered as CSV with columns
/// `round,client,main_acc,loss,poison_acc_sig_<owner>..,asr`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLog {
    sig_owners: Vec<usize>,
    rows: Vec<MetricsRow>,
}

impl MetricsLog {
    pub fn new(sig_owners: Vec<usize>) -> Self {
        MetricsLog {
            sig_owners,
            rows: Vec::new(),
        }
    }

    pub fn sig_owners(&self) -> &[usize] {
        &self.sig_owners
    }

    pub fn push(&mut self, row: MetricsRow) {
        debug_assert_eq!(row.poison_acc.len(), self.sig_owners.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last_round(&self) -> Option<usize> {
        self.rows.last().map(|r| r.round)
    }

    fn cell(v: Option<f64>) -> String {
        v.map(|x| format!("{x:.6}")).unwrap_or_default()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,client,main_acc,loss");
        for owner in &self.sig_owners {
            out.push_str(&format!(",poison_acc_sig_{owner}"));
        }
        out.push_str(",asr\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}",
                r.round,
                r.client,
                Self::cell(r.main_acc),
                Self::cell(r.loss)
            ));
            for v in &r.poison_acc {
                out.push(',');
                out.push_str(&Self::cell(*v));
            }
            out.push(',');
            out.push_str(&Self::cell(r.asr));
            out.push('\n');
        }
        out
    }

    fn last_evaluated<F: Fn(&MetricsRow) -> Option<f64>>(
        &self,
        honest_only: Option<&[usize]>,
        field: F,
    ) -> Option<f64> {
        let round = self
            .rows
            .iter()
            .rev()
            .find(|r| field(r).is_some())
            .map(|r| r.round)?;
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.round == round)
            .filter(|r| honest_only.map_or(true, |ids| !ids.contains(&r.client)))
            .filter_map(&field)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(crate::stats::mean(&vals))
        }
    }

    /// Mean ASR over non-attacker clients at the last evaluated round.
    pub fn final_mean_asr(&self, attacker_ids: &[usize]) -> Option<f64> {
        self.last_evaluated(Some(attacker_ids), |r| r.asr)
    }

    /// Mean main-task accuracy over all clients at the last evaluated round.
    pub fn final_mean_acc(&self) -> Option<f64> {
        self.last_evaluated(None, |r| r.main_acc)
    }
}
