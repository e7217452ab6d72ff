//! Config-driven regressor pretraining: generate detection-phase samples,
//! train, evaluate on held-out runs, and persist the model plus an MAE
//! table.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regressor::{
    constant_baseline_mae, generate_samples, save_model, split_by_run, train_distance_model,
    MaeTable, SampleGen, DEFAULT_DISTANCE_CAP,
};
use crate::rng;
use crate::sim::SimConfig;
use crate::topology::TopologySpec;

use super::config::DatasetSpec;
use super::run::sidecar_hash;

pub const MAE_FILE: &str = "mae_by_distance.csv";
pub const SIDECAR_FILE: &str = "pretrain.meta";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainSection {
    #[serde(default = "default_n_runs")]
    pub n_runs: usize,
    #[serde(default = "default_attackers_per_run")]
    pub attackers_per_run: usize,
    /// Every k-th run (run index divisible by k) is held out for evaluation.
    #[serde(default = "default_holdout_every")]
    pub holdout_every: usize,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_pretrain_lr")]
    pub lr: f64,
    #[serde(default = "default_pretrain_hidden")]
    pub hidden_dim: usize,
    #[serde(default = "default_cap")]
    pub distance_cap: usize,
}

fn default_n_runs() -> usize {
    25
}
fn default_attackers_per_run() -> usize {
    3
}
fn default_holdout_every() -> usize {
    5
}
fn default_epochs() -> usize {
    300
}
fn default_pretrain_lr() -> f64 {
    0.05
}
fn default_pretrain_hidden() -> usize {
    24
}
fn default_cap() -> usize {
    DEFAULT_DISTANCE_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Model file name, relative to `out_dir`.
    #[serde(default = "default_model_out")]
    pub model_out: PathBuf,
    pub topology: TopologySpec,
    pub dataset: DatasetSpec,
    pub sim: SimConfig,
    pub pretrain: PretrainSection,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs/pretrain")
}
fn default_model_out() -> PathBuf {
    PathBuf::from("distance.model")
}

impl PretrainConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: PretrainConfig = toml::from_str(text).map_err(Error::config_from)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path.as_ref())?)
    }

    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn config_hash(&self) -> String {
        let mut for_hash = self.clone();
        for_hash.out_dir = PathBuf::new();
        for_hash.model_out = PathBuf::new();
        let canonical = toml::to_string(&for_hash).expect("config serializes");
        rng::sha256_hex(canonical.as_bytes())[..16].to_string()
    }

    pub fn validate(&self) -> Result<()> {
        self.sim
            .validate()
            .map_err(|e| Error::config(format!("[sim]: {e}")))?;
        let p = &self.pretrain;
        if p.n_runs < 2 {
            return Err(Error::config("pretrain.n_runs: need at least 2 runs"));
        }
        if p.attackers_per_run < 2 {
            return Err(Error::config(
                "pretrain.attackers_per_run: need at least 2 to form pairs",
            ));
        }
        if p.attackers_per_run > self.topology.node_count() {
            return Err(Error::config(format!(
                "pretrain.attackers_per_run: {} exceeds the {}-node topology",
                p.attackers_per_run,
                self.topology.node_count()
            )));
        }
        if p.holdout_every < 2 {
            return Err(Error::config(
                "pretrain.holdout_every: must be >= 2 so training runs remain",
            ));
        }
        if p.epochs == 0 {
            return Err(Error::config("pretrain.epochs: must be positive"));
        }
        if !(p.lr > 0.0 && p.lr.is_finite()) {
            return Err(Error::config(format!(
                "pretrain.lr: must be positive, got {}",
                p.lr
            )));
        }
        if p.hidden_dim == 0 {
            return Err(Error::config("pretrain.hidden_dim: must be positive"));
        }
        if p.distance_cap == 0 {
            return Err(Error::config("pretrain.distance_cap: must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct PretrainOutput {
    pub model_path: PathBuf,
    pub mae_csv_path: PathBuf,
    pub config_hash: String,
    pub table: MaeTable,
    pub overall_mae: f64,
    pub baseline_mae: f64,
    pub n_train: usize,
    pub n_held: usize,
}

/// Execute the pipeline: sample generation → split by run → training →
/// held-out evaluation → model + MAE table on disk. Rerunning with the same
/// seed produces a byte-identical model file.
pub fn run_pretrain(config: &PretrainConfig) -> Result<PretrainOutput> {
    let hash = config.config_hash();
    let out_dir = &config.out_dir;
    let sidecar = out_dir.join(SIDECAR_FILE);
    if let Some(existing) = sidecar_hash(&sidecar) {
        if existing != hash {
            return Err(Error::config(format!(
                "refusing to overwrite {}: it holds results for config {existing}, \
                 this config hashes to {hash}; pick a fresh --out",
                out_dir.display()
            )));
        }
    }
    fs::create_dir_all(out_dir)?;

    let (train_pool, _) = config.dataset.load(config.seed)?;
    let gen = SampleGen {
        topology: &config.topology,
        dataset: &train_pool,
        num_classes: config.dataset.num_classes(),
        sim: &config.sim,
        distance_cap: config.pretrain.distance_cap,
    };
    println!(
        "generating samples: {} runs x {} attackers on {} ...",
        config.pretrain.n_runs,
        config.pretrain.attackers_per_run,
        config.topology.family()
    );
    let samples = generate_samples(
        &gen,
        config.pretrain.n_runs,
        config.pretrain.attackers_per_run,
        rng::derive_seed(config.seed, "pretrain.samples", &[]),
    )?;
    let (train, held) = split_by_run(&samples, config.pretrain.holdout_every);
    println!(
        "{} samples ({} train / {} held out by run)",
        samples.len(),
        train.len(),
        held.len()
    );

    let report = train_distance_model(
        &train,
        config.topology.family(),
        config.pretrain.distance_cap,
        config.pretrain.epochs,
        config.pretrain.lr,
        config.pretrain.hidden_dim,
        rng::derive_seed(config.seed, "pretrain.train", &[]),
    )?;
    let final_mse = *report.epoch_mse.last().expect("at least one epoch");
    println!(
        "trained {} epochs: MSE {:.4} -> {:.4}",
        report.epoch_mse.len(),
        report.epoch_mse[0],
        final_mse
    );

    let table = evaluate_and_report(&report.model, &held)?;
    let overall = table.overall_mae();
    let baseline = constant_baseline_mae(&train, &held);

    let model_path = out_dir.join(&config.model_out);
    save_model(&report.model, &model_path)?;
    let mae_csv_path = out_dir.join(MAE_FILE);
    fs::write(&mae_csv_path, table.to_csv())?;

    let meta = format!(
        "config_hash = {hash}\nseed = {}\nsamples = {}\ntrain = {}\nheld_out = {}\n\
         final_train_mse = {final_mse}\noverall_mae = {overall}\nbaseline_mae = {baseline}\n\
         model = {}\n\n[config]\n{}",
        config.seed,
        samples.len(),
        train.len(),
        held.len(),
        config.model_out.display(),
        config.to_canonical_toml()
    );
    fs::write(&sidecar, meta)?;

    println!(
        "held-out MAE {overall:.3} (constant baseline {baseline:.3}); model at {}",
        model_path.display()
    );
    Ok(PretrainOutput {
        model_path,
        mae_csv_path,
        config_hash: hash,
        table,
        overall_mae: overall,
        baseline_mae: baseline,
        n_train: train.len(),
        n_held: held.len(),
    })
}

fn evaluate_and_report(
    model: &crate::regressor::DistanceModel,
    held: &[crate::regressor::DistanceSample],
) -> Result<MaeTable> {
    let table = crate::regressor::evaluate_distance_model(model, held)?;
    println!("true_distance  count  mae");
    for &(d, n, mae) in &table.rows {
        println!("{d:>13}  {n:>5}  {mae:.3}");
    }
    Ok(table)
}
