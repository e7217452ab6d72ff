//! The distance-prediction pipeline: generate (sequence difference, hop
//! distance) samples from detection-only simulations, train the LSTM
//! regressor on them, evaluate MAE by distance, and persist the model.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::attack::{AttackPlan, AttackStrategy, AttackerSet, DistanceSource};
use crate::data::{shard_iid, LabeledImage, TriggerSpec};
use crate::error::{Error, Result};
use crate::nn::{init_lstm, lstm_mse_grad, lstm_regress, sgd_step, GradientVector, ModelParams};
use crate::rng;
use crate::sim::{SimConfig, SimEngine};
use crate::topology::TopologySpec;

pub const DEFAULT_DISTANCE_CAP: usize = 6;

/// The pretrained regressor G(·) plus the metadata needed to apply it:
/// the sequence length it was trained at (enforced at inference) and the
/// normalization constants of its training inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceModel {
    params: ModelParams,
    pub topology_family: String,
    pub sequence_length: usize,
    pub norm_mean: f64,
    pub norm_std: f64,
    pub distance_cap: usize,
}

impl DistanceModel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn normalize(&self, diff: &[f64]) -> Vec<f64> {
        prepare_input(diff, self.norm_mean, self.norm_std)
    }

    /// Predicted hop distance for one sequence difference. The raw head
    /// output is returned un-clamped; matrix construction clamps negatives.
    pub fn predict(&self, sequence_diff: &[f64]) -> Result<f64> {
        if sequence_diff.len() != self.sequence_length {
            return Err(Error::invalid(format!(
                "sequence length {} does not match the model's training length {}",
                sequence_diff.len(),
                self.sequence_length
            )));
        }
        lstm_regress(&self.params, &self.normalize(sequence_diff))
    }

    /// Human-facing form: predictions beyond the cap read "≥ cap".
    pub fn describe_prediction(&self, y: f64) -> String {
        if y > self.distance_cap as f64 {
            format!(">={}", self.distance_cap)
        } else {
            format!("{y:.2}")
        }
    }
}

/// Centered moving average (window 9, truncated at the edges). Poison
/// accuracy is quantized to ninths and flaps round to round; the regression
/// target lives in the envelope, so hand the network the envelope.
fn smooth(diff: &[f64]) -> Vec<f64> {
    let n = diff.len();
    let half = 4usize;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            diff[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Smooth, standardize, and reverse a sequence difference for the LSTM. The
/// reversal matters: a recurrent readout resolves the end of its input most
/// sharply, and the transitions that separate near distances happen in the
/// earliest rounds, so the sequence is fed back-to-front.
fn prepare_input(diff: &[f64], mean: f64, std: f64) -> Vec<f64> {
    smooth(diff)
        .into_iter()
        .rev()
        .map(|x| (x - mean) / std)
        .collect()
}

/// One supervised example: an ordered attacker pair's sequence difference
/// and the BFS ground-truth distance, tagged with its source run so
/// train/held-out splits never share a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub run: usize,
    pub sequence_diff: Vec<f64>,
    pub true_distance: usize,
}

/// Everything sample generation needs besides counts and the seed.
pub struct SampleGen<'a> {
    pub topology: &'a TopologySpec,
    pub dataset: &'a [LabeledImage],
    pub num_classes: usize,
    pub sim: &'a SimConfig,
    pub distance_cap: usize,
}

/// Run `n_runs` detection-only simulations with seeded attacker placement and
/// emit one sample per ordered attacker pair whose true distance lies in
/// `1..=cap`. For the `random` topology family each run builds a fresh
/// seeded graph; other families reuse the declared one.
pub fn generate_samples(
    gen: &SampleGen<'_>,
    n_runs: usize,
    attackers_per_run: usize,
    seed: u64,
) -> Result<Vec<DistanceSample>> {
    if attackers_per_run < 2 {
        return Err(Error::invalid("attackers_per_run must be >= 2"));
    }
    if n_runs == 0 {
        return Err(Error::invalid("n_runs must be positive"));
    }
    let mut samples = Vec::new();
    for run in 0..n_runs {
        let topo = match *gen.topology {
            TopologySpec::Random { n, target_degree, .. } => TopologySpec::Random {
                n,
                target_degree,
                seed: rng::derive_seed(seed, "regressor.topo", &[run as u64]),
            }
            .build()?,
            ref fixed => fixed.build()?,
        };
        let n = topo.node_count();
        if attackers_per_run > n {
            return Err(Error::invalid(format!(
                "{attackers_per_run} attackers on {n} nodes"
            )));
        }
        let mut nodes: Vec<usize> = (0..n).collect();
        let mut place = rng::stream(seed, "regressor.place", &[run as u64]);
        nodes.shuffle(&mut place);
        let mut attackers = nodes[..attackers_per_run].to_vec();
        attackers.sort_unstable();

        let side = gen.dataset[0].height;
        let plan = AttackPlan {
            strategy: AttackStrategy::ClusterDba,
            // The trigger is irrelevant during detection; any valid one works.
            trigger: TriggerSpec::blocks(1, 1, 0, (0, 0), 0, 1.0, (side, gen.dataset[0].width))?,
            attackers: AttackerSet::build(
                &attackers,
                0.5,
                0,
                side,
                gen.num_classes,
                rng::derive_seed(seed, "regressor.signatures", &[run as u64]),
            )?,
            num_clusters: 1,
            distance_source: DistanceSource::Oracle,
            distance_error: 0.0,
        };
        let shards = shard_iid(
            gen.dataset,
            n,
            rng::derive_seed(seed, "regressor.shard", &[run as u64]),
        )?;
        let mut config = gen.sim.clone();
        config.eval_subset = 0; // detection only; no accuracy/ASR evaluation
        let mut engine = SimEngine::new(
            topo.clone(),
            shards,
            Vec::new(),
            plan,
            crate::defense::DefenseSpec::None,
            config,
            gen.num_classes,
            rng::derive_seed(seed, "regressor.run", &[run as u64]),
        )?;
        engine.run_detection()?;

        for &a in &attackers {
            let from_a = topo.hop_distances_from(a)?;
            for &b in &attackers {
                if a == b {
                    continue;
                }
                let d = from_a[b];
                if d == 0 || d > gen.distance_cap {
                    continue;
                }
                samples.push(DistanceSample {
                    run,
                    sequence_diff: engine.signals().difference(a, b)?,
                    true_distance: d,
                });
            }
        }
    }
    Ok(samples)
}

/// Hold out every `holdout_every`-th run (run index divisible by it); the
/// remaining runs train. Splitting by run, not by pair, prevents leakage
/// between pairs from the same simulation.
pub fn split_by_run(
    samples: &[DistanceSample],
    holdout_every: usize,
) -> (Vec<DistanceSample>, Vec<DistanceSample>) {
    let held: Vec<DistanceSample> = samples
        .iter()
        .filter(|s| s.run % holdout_every == 0)
        .cloned()
        .collect();
    let train: Vec<DistanceSample> = samples
        .iter()
        .filter(|s| s.run % holdout_every != 0)
        .cloned()
        .collect();
    (train, held)
}

/// Training result: the model plus the full-batch MSE curve.
pub struct TrainReport {
    pub model: DistanceModel,
    pub epoch_mse: Vec<f64>,
}

/// Full-batch gradient descent on MSE over normalized sequence differences.
pub fn train_distance_model(
    samples: &[DistanceSample],
    topology_family: &str,
    distance_cap: usize,
    epochs: usize,
    lr: f64,
    hidden_dim: usize,
    seed: u64,
) -> Result<TrainReport> {
    if samples.len() < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 training samples, got {}",
            samples.len()
        )));
    }
    let seq_len = samples[0].sequence_diff.len();
    if samples.iter().any(|s| s.sequence_diff.len() != seq_len) {
        return Err(Error::invalid("inconsistent sequence lengths in training set"));
    }

    // Standardization constants come from the smoothed training inputs, the
    // same form the network sees.
    let all: Vec<f64> = samples
        .iter()
        .flat_map(|s| smooth(&s.sequence_diff))
        .collect();
    let norm_mean = crate::stats::mean(&all);
    let var = all
        .iter()
        .map(|x| (x - norm_mean) * (x - norm_mean))
        .sum::<f64>()
        / all.len() as f64;
    let norm_std = var.sqrt().max(1e-9);

    let normalized: Vec<(Vec<f64>, f64)> = samples
        .iter()
        .map(|s| {
            (
                prepare_input(&s.sequence_diff, norm_mean, norm_std),
                s.true_distance as f64,
            )
        })
        .collect();

    let mut params = init_lstm(1, hidden_dim, rng::derive_seed(seed, "regressor.init", &[]))?;
    let inv_n = 1.0 / normalized.len() as f64;
    let mut epoch_mse = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let mut total = 0.0;
        let mut grad = GradientVector::zeros_like(&params);
        for (seq, target) in &normalized {
            let (loss, g) = lstm_mse_grad(&params, seq, *target)?;
            total += loss;
            grad.add_assign(&g);
        }
        grad.scale(inv_n);
        let mse = total * inv_n;
        if !mse.is_finite() {
            return Err(Error::Numerical {
                round: epoch,
                client: 0,
                message: format!("training MSE diverged at epoch {epoch}"),
            });
        }
        epoch_mse.push(mse);
        params = sgd_step(&params, &grad, lr)?;
    }

    Ok(TrainReport {
        model: DistanceModel {
            params,
            topology_family: topology_family.to_string(),
            sequence_length: seq_len,
            norm_mean,
            norm_std,
            distance_cap,
        },
        epoch_mse,
    })
}

/// Per-distance mean absolute error on a held-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct MaeTable {
    /// `(true_distance, count, mae)`, ascending by distance.
    pub rows: Vec<(usize, usize, f64)>,
}

impl MaeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true_distance,count,mae\n");
        for &(d, n, mae) in &self.rows {
            out.push_str(&format!("{d},{n},{mae:.6}\n"));
        }
        out
    }

    pub fn overall_mae(&self) -> f64 {
        let total: usize = self.rows.iter().map(|r| r.1).sum();
        let weighted: f64 = self.rows.iter().map(|r| r.1 as f64 * r.2).sum();
        weighted / total as f64
    }

    pub fn mae_at(&self, d: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.0 == d).map(|r| r.2)
    }
}

pub fn evaluate_distance_model(
    model: &DistanceModel,
    held_out: &[DistanceSample],
) -> Result<MaeTable> {
    if held_out.is_empty() {
        return Err(Error::invalid("evaluate_distance_model: empty held-out set"));
    }
    let mut by_distance: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for s in held_out {
        let pred = model.predict(&s.sequence_diff)?;
        by_distance
            .entry(s.true_distance)
            .or_default()
            .push((pred - s.true_distance as f64).abs());
    }
    Ok(MaeTable {
        rows: by_distance
            .into_iter()
            .map(|(d, errs)| (d, errs.len(), crate::stats::mean(&errs)))
            .collect(),
    })
}

/// MAE of always predicting the mean training distance — the bar any useful
/// regressor must beat.
pub fn constant_baseline_mae(train: &[DistanceSample], held_out: &[DistanceSample]) -> f64 {
    let mean_d = crate::stats::mean(
        &train
            .iter()
            .map(|s| s.true_distance as f64)
            .collect::<Vec<f64>>(),
    );
    let errs: Vec<f64> = held_out
        .iter()
        .map(|s| (mean_d - s.true_distance as f64).abs())
        .collect();
    crate::stats::mean(&errs)
}

/// File layout: the flat binary parameter block, then a plain-text metadata
/// footer (`key = value` lines). Round-trips bit-exactly.
pub fn save_model(model: &DistanceModel, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    model.params.write_binary(&mut buf)?;
    let footer = format!(
        "family = {}\nsequence_length = {}\nnorm_mean = {}\nnorm_std = {}\ndistance_cap = {}\n",
        model.topology_family,
        model.sequence_length,
        model.norm_mean,
        model.norm_std,
        model.distance_cap
    );
    buf.extend_from_slice(footer.as_bytes());
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DistanceModel> {
    let bytes = fs::read(path.as_ref())?;
    let mut cursor = bytes.as_slice();
    let params = ModelParams::read_binary(&mut cursor)?;
    let consumed = bytes.len() - cursor.len();
    let footer = std::str::from_utf8(cursor).map_err(|_| Error::Format {
        offset: consumed as u64,
        message: "metadata footer is not UTF-8".into(),
    })?;
    let mut family = None;
    let mut sequence_length = None;
    let mut norm_mean = None;
    let mut norm_std = None;
    let mut distance_cap = None;
    for (lineno, line) in footer.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            offset: consumed as u64,
            message: format!("metadata line {} is not `key = value`: {line:?}", lineno + 1),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |what: &str| Error::Format {
            offset: consumed as u64,
            message: format!("bad {what} in metadata: {value:?}"),
        };
        match key {
            "family" => family = Some(value.to_string()),
            "sequence_length" => {
                sequence_length = Some(value.parse().map_err(|_| parse_err("sequence_length"))?)
            }
            "norm_mean" => norm_mean = Some(value.parse().map_err(|_| parse_err("norm_mean"))?),
            "norm_std" => norm_std = Some(value.parse().map_err(|_| parse_err("norm_std"))?),
            "distance_cap" => {
                distance_cap = Some(value.parse().map_err(|_| parse_err("distance_cap"))?)
            }
            other => {
                return Err(Error::Format {
                    offset: consumed as u64,
                    message: format!("unknown metadata key {other:?}"),
                })
            }
        }
    }
    let missing = |what: &str| Error::Format {
        offset: consumed as u64,
        message: format!("metadata footer missing {what}"),
    };
    Ok(DistanceModel {
        params,
        topology_family: family.ok_or_else(|| missing("family"))?,
        sequence_length: sequence_length.ok_or_else(|| missing("sequence_length"))?,
        norm_mean: norm_mean.ok_or_else(|| missing("norm_mean"))?,
        norm_std: norm_std.ok_or_else(|| missing("norm_std"))?,
        distance_cap: distance_cap.ok_or_else(|| missing("distance_cap"))?,
    })
}
