//! Declarative experiment configs: TOML parsing, validation with
//! field-naming diagnostics, content hashing, and resolution into concrete
//! simulator inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::{AttackPlan, AttackStrategy, AttackerSet, DistanceSource};
use crate::data::{load_mnist_idx, make_synthetic, shard_iid, subset, LabeledImage, TriggerSpec};
use crate::defense::DefenseSpec;
use crate::error::{Error, Result};
use crate::regressor::load_model;
use crate::rng;
use crate::sim::SimConfig;
use crate::topology::{Topology, TopologySpec};

/// Where training and evaluation images come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// Seeded Gaussian-blob classes; always available, fast, and easy.
    Synthetic {
        #[serde(default = "default_classes")]
        classes: usize,
        #[serde(default = "default_side")]
        side: usize,
        #[serde(default = "default_train_per_class")]
        train_per_class: usize,
        #[serde(default = "default_test_per_class")]
        test_per_class: usize,
    },
    /// Seeded subset of MNIST read from IDX files in `dir` (the four
    /// standard file names). Loads the full files briefly, then keeps only
    /// the subset.
    MnistSubset {
        #[serde(default = "default_mnist_dir")]
        dir: PathBuf,
        #[serde(default = "default_mnist_train")]
        train_size: usize,
        #[serde(default = "default_mnist_test")]
        test_size: usize,
    },
}

fn default_classes() -> usize {
    4
}
fn default_side() -> usize {
    16
}
fn default_train_per_class() -> usize {
    500
}
fn default_test_per_class() -> usize {
    125
}
fn default_mnist_dir() -> PathBuf {
    PathBuf::from("data/mnist")
}
fn default_mnist_train() -> usize {
    4000
}
fn default_mnist_test() -> usize {
    1000
}

impl DatasetSpec {
    pub fn num_classes(&self) -> usize {
        match self {
            DatasetSpec::Synthetic { classes, .. } => *classes,
            DatasetSpec::MnistSubset { .. } => 10,
        }
    }

    pub fn side(&self) -> usize {
        match self {
            DatasetSpec::Synthetic { side, .. } => *side,
            DatasetSpec::MnistSubset { .. } => 28,
        }
    }

    /// `true` when the backing files exist (always true for synthetic).
    pub fn available(&self) -> bool {
        match self {
            DatasetSpec::Synthetic { .. } => true,
            DatasetSpec::MnistSubset { dir, .. } => {
                mnist_files(dir).iter().all(|p| p.exists())
            }
        }
    }

    /// Load `(train_pool, test_pool)`, seeded so the same seed always picks
    /// the same subset.
    pub fn load(&self, seed: u64) -> Result<(Vec<LabeledImage>, Vec<LabeledImage>)> {
        match self {
            DatasetSpec::Synthetic {
                classes,
                side,
                train_per_class,
                test_per_class,
            } => {
                let train = make_synthetic(
                    *classes,
                    *train_per_class,
                    *side,
                    rng::derive_seed(seed, "data.synthetic_train", &[]),
                )?;
                let test = make_synthetic(
                    *classes,
                    *test_per_class,
                    *side,
                    rng::derive_seed(seed, "data.synthetic_test", &[]),
                )?;
                Ok((train, test))
            }
            DatasetSpec::MnistSubset {
                dir,
                train_size,
                test_size,
            } => {
                let [ti, tl, vi, vl] = mnist_files(dir);
                let train_full = load_mnist_idx(&ti, &tl)?;
                let test_full = load_mnist_idx(&vi, &vl)?;
                let train = subset(
                    &train_full,
                    (*train_size).min(train_full.len()),
                    rng::derive_seed(seed, "data.mnist_train_subset", &[]),
                )?;
                let test = subset(
                    &test_full,
                    (*test_size).min(test_full.len()),
                    rng::derive_seed(seed, "data.mnist_test_subset", &[]),
                )?;
                Ok((train, test))
            }
        }
    }
}

fn mnist_files(dir: &Path) -> [PathBuf; 4] {
    [
        dir.join("train-images-idx3-ubyte"),
        dir.join("train-labels-idx1-ubyte"),
        dir.join("t10k-images-idx3-ubyte"),
        dir.join("t10k-labels-idx1-ubyte"),
    ]
}

/// Trigger geometry; the target label lives in `[attack]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSection {
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_trigger_size")]
    pub size: usize,
    #[serde(default = "default_trigger_gap")]
    pub gap: usize,
    #[serde(default)]
    pub shift: (usize, usize),
    #[serde(default = "default_pixel_value")]
    pub pixel_value: f64,
}

fn default_blocks() -> usize {
    4
}
fn default_trigger_size() -> usize {
    2
}
fn default_trigger_gap() -> usize {
    2
}
fn default_pixel_value() -> f64 {
    1.0
}

impl Default for TriggerSection {
    fn default() -> Self {
        TriggerSection {
            blocks: default_blocks(),
            size: default_trigger_size(),
            gap: default_trigger_gap(),
            shift: (0, 0),
            pixel_value: default_pixel_value(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceSourceSpec {
    Oracle,
    Model,
}

/// The `[attack]` section, unresolved (model path not yet loaded).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub strategy: AttackStrategy,
    #[serde(default)]
    pub attackers: Vec<usize>,
    #[serde(default = "default_num_clusters")]
    pub num_clusters: usize,
    #[serde(default = "default_poison_fraction")]
    pub poison_fraction: f64,
    #[serde(default)]
    pub target_label: usize,
    #[serde(default = "default_distance_source")]
    pub distance_source: DistanceSourceSpec,
    #[serde(default)]
    pub model_path: Option<PathBuf>,
    #[serde(default)]
    pub distance_error: f64,
    /// When set, `poison_fraction` is read as the cluster-DBA budget and the
    /// configured strategy's fraction is rescaled so every strategy stamps
    /// the same expected number of trigger pixels per round.
    #[serde(default)]
    pub equal_budget: bool,
}

fn default_num_clusters() -> usize {
    1
}
fn default_poison_fraction() -> f64 {
    0.25
}
fn default_distance_source() -> DistanceSourceSpec {
    DistanceSourceSpec::Oracle
}

impl Default for AttackSection {
    fn default() -> Self {
        AttackSection {
            strategy: AttackStrategy::None,
            attackers: Vec::new(),
            num_clusters: default_num_clusters(),
            poison_fraction: default_poison_fraction(),
            target_label: 0,
            distance_source: default_distance_source(),
            model_path: None,
            distance_error: 0.0,
            equal_budget: false,
        }
    }
}

/// Everything needed to reconstruct a run. Round-trips losslessly through
/// TOML; the content hash is taken over the canonical serialization, so key
/// order in the source file never matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub topology: TopologySpec,
    pub dataset: DatasetSpec,
    pub sim: SimConfig,
    #[serde(default)]
    pub attack: AttackSection,
    #[serde(default)]
    pub trigger: TriggerSection,
    #[serde(default)]
    pub defense: DefenseSpec,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs/run")
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(Error::config_from)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex digest identifying the experiment. The output directory is
    /// excluded: the same science written elsewhere is the same experiment.
    pub fn config_hash(&self) -> String {
        let mut for_hash = self.clone();
        for_hash.out_dir = PathBuf::new();
        let canonical = toml::to_string(&for_hash).expect("config serializes");
        rng::sha256_hex(canonical.as_bytes())[..16].to_string()
    }

    /// Semantic checks beyond what serde enforces, each naming the offending
    /// field so the CLI can exit with a useful diagnostic.
    pub fn validate(&self) -> Result<()> {
        self.sim.validate().map_err(|e| Error::config(format!("[sim]: {e}")))?;
        self.defense
            .validate()
            .map_err(|e| Error::config(format!("[defense]: {e}")))?;
        let n = self.topology.node_count();
        if let Some(&bad) = self.attack.attackers.iter().find(|&&a| a >= n) {
            return Err(Error::config(format!(
                "attack.attackers: node {bad} outside topology of {n} nodes"
            )));
        }
        let classes = self.dataset.num_classes();
        if self.attack.target_label >= classes {
            return Err(Error::config(format!(
                "attack.target_label: {} out of range for {} classes",
                self.attack.target_label, classes
            )));
        }
        if !(0.0..=1.0).contains(&self.attack.poison_fraction) {
            return Err(Error::config(format!(
                "attack.poison_fraction: {} outside [0, 1]",
                self.attack.poison_fraction
            )));
        }
        if self.attack.distance_error < 0.0 {
            return Err(Error::config(format!(
                "attack.distance_error: {} is negative",
                self.attack.distance_error
            )));
        }
        if self.attack.strategy == AttackStrategy::ClusterDba {
            let a = self.attack.attackers.len();
            if self.attack.num_clusters == 0 || self.attack.num_clusters > a {
                return Err(Error::config(format!(
                    "attack.num_clusters: need 1 <= K <= {a} attackers, got {}",
                    self.attack.num_clusters
                )));
            }
            if self.attack.distance_source == DistanceSourceSpec::Model
                && self.attack.model_path.is_none()
            {
                return Err(Error::config(
                    "attack.model_path: required when distance_source = \"model\"",
                ));
            }
        }
        if self.attack.strategy != AttackStrategy::None && self.attack.attackers.is_empty() {
            return Err(Error::config(
                "attack.attackers: empty, but an attack strategy is configured",
            ));
        }
        let side = self.dataset.side();
        // Dry-build the trigger so geometry problems surface as config errors.
        self.build_trigger(side)
            .map_err(|e| Error::config(format!("[trigger]: {e}")))?;
        Ok(())
    }

    fn build_trigger(&self, side: usize) -> Result<TriggerSpec> {
        TriggerSpec::blocks(
            self.trigger.blocks,
            self.trigger.size,
            self.trigger.gap,
            self.trigger.shift,
            self.attack.target_label,
            self.trigger.pixel_value,
            (side, side),
        )
    }

    /// The fraction actually used for this strategy under the equal-pixel
    /// budget convention (identity when `equal_budget` is off).
    pub fn effective_poison_fraction(&self) -> f64 {
        if !self.attack.equal_budget || self.attack.attackers.is_empty() {
            return self.attack.poison_fraction;
        }
        let (f_cluster, f_naive, f_central) = crate::attack::equal_budget_fractions(
            self.attack.poison_fraction,
            self.attack.num_clusters,
            self.attack.attackers.len(),
        );
        match self.attack.strategy {
            AttackStrategy::None | AttackStrategy::ClusterDba => f_cluster,
            AttackStrategy::NaiveDba => f_naive,
            AttackStrategy::Centralized => f_central,
        }
    }

    /// Resolve the declarative config into concrete simulator inputs.
    pub fn build_inputs(&self) -> Result<ResolvedInputs> {
        let seed = self.seed;
        let topology = self.topology.build()?;
        let (train_pool, test_pool) = self.dataset.load(seed)?;
        let shards = shard_iid(
            &train_pool,
            topology.node_count(),
            rng::derive_seed(seed, "experiment.shard", &[]),
        )?;
        let side = self.dataset.side();
        let classes = self.dataset.num_classes();
        let trigger = self.build_trigger(side)?;
        let attackers = AttackerSet::build(
            &self.attack.attackers,
            self.effective_poison_fraction(),
            self.attack.target_label,
            side,
            classes,
            rng::derive_seed(seed, "experiment.signatures", &[]),
        )?;
        let distance_source = match self.attack.distance_source {
            DistanceSourceSpec::Oracle => DistanceSource::Oracle,
            DistanceSourceSpec::Model => {
                let path = self.attack.model_path.as_ref().ok_or_else(|| {
                    Error::config("attack.model_path: required when distance_source = \"model\"")
                })?;
                let model = load_model(path)?;
                if model.topology_family != self.topology.family() {
                    return Err(Error::config(format!(
                        "attack.model_path: model was trained on `{}` topologies, config uses `{}`",
                        model.topology_family,
                        self.topology.family()
                    )));
                }
                if model.sequence_length != self.sim.detection_rounds {
                    return Err(Error::config(format!(
                        "attack.model_path: model expects {} detection rounds, config has {}",
                        model.sequence_length, self.sim.detection_rounds
                    )));
                }
                DistanceSource::Model(model)
            }
        };
        let plan = AttackPlan {
            strategy: self.attack.strategy,
            trigger,
            attackers,
            num_clusters: self.attack.num_clusters,
            distance_source,
            distance_error: self.attack.distance_error,
        };
        Ok(ResolvedInputs {
            topology,
            shards,
            test_set: test_pool,
            plan,
            defense: self.defense,
            sim: self.sim.clone(),
            num_classes: classes,
            seed,
        })
    }
}

/// Concrete inputs ready for [`crate::sim::SimEngine::new`].
pub struct ResolvedInputs {
    pub topology: Topology,
    pub shards: Vec<Vec<LabeledImage>>,
    pub test_set: Vec<LabeledImage>,
    pub plan: AttackPlan,
    pub defense: DefenseSpec,
    pub sim: SimConfig,
    pub num_classes: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
seed = 42
out_dir = "runs/demo"

[topology]
kind = "ring"
n = 12

[dataset]
kind = "synthetic"
classes = 4
side = 16
train_per_class = 50
test_per_class = 20

[sim]
protocol = "dpsgd"
total_rounds = 6
detection_rounds = 2
local_steps = 1
lr = 0.1
batch_size = 8
eval_subset = 20
eval_every = 2
hidden_dim = 8

[attack]
strategy = "cluster_dba"
attackers = [0, 1, 6, 7]
num_clusters = 2
poison_fraction = 0.4
target_label = 0

[defense]
kind = "none"
"#;

    #[test]
    fn parses_and_roundtrips_losslessly() {
        let config = ExperimentConfig::from_toml_str(BASE).unwrap();
        let text = config.to_canonical_toml();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn hash_invariant_to_key_order_and_out_dir() {
        let config = ExperimentConfig::from_toml_str(BASE).unwrap();
        // Same fields, sections and keys shuffled.
        let reordered = r#"
out_dir = "runs/demo"
seed = 42

[defense]
kind = "none"

[sim]
hidden_dim = 8
eval_every = 2
eval_subset = 20
batch_size = 8
lr = 0.1
local_steps = 1
detection_rounds = 2
total_rounds = 6
protocol = "dpsgd"

[attack]
target_label = 0
poison_fraction = 0.4
num_clusters = 2
attackers = [0, 1, 6, 7]
strategy = "cluster_dba"

[dataset]
test_per_class = 20
train_per_class = 50
side = 16
classes = 4
kind = "synthetic"

[topology]
n = 12
kind = "ring"
"#;
        let other = ExperimentConfig::from_toml_str(reordered).unwrap();
        assert_eq!(config.config_hash(), other.config_hash());

        // Different out_dir: same experiment, same hash.
        let mut moved = config.clone();
        moved.out_dir = PathBuf::from("elsewhere");
        assert_eq!(config.config_hash(), moved.config_hash());

        // Different seed: different experiment.
        let mut reseeded = config.clone();
        reseeded.seed = 43;
        assert_ne!(config.config_hash(), reseeded.config_hash());
    }

    #[test]
    fn missing_seed_names_the_field() {
        let text = BASE.replace("seed = 42", "");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("seed"), "diagnostic was: {msg}");
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn unknown_field_names_the_field() {
        let text = format!("{BASE}\n[sim2]\nx = 1\n");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert!(format!("{err}").contains("sim2"));
    }

    #[test]
    fn semantic_validation_names_fields() {
        let oob = BASE.replace("attackers = [0, 1, 6, 7]", "attackers = [0, 1, 6, 12]");
        let err = ExperimentConfig::from_toml_str(&oob).unwrap_err();
        assert!(format!("{err}").contains("attack.attackers"));

        let bad_k = BASE.replace("num_clusters = 2", "num_clusters = 9");
        let err = ExperimentConfig::from_toml_str(&bad_k).unwrap_err();
        assert!(format!("{err}").contains("attack.num_clusters"));

        let bad_label = BASE.replace("target_label = 0", "target_label = 4");
        let err = ExperimentConfig::from_toml_str(&bad_label).unwrap_err();
        assert!(format!("{err}").contains("attack.target_label"));

        let no_model = BASE.replace(
            "distance_error = 0.0",
            "",
        );
        // Model source without a path.
        let text = no_model.replace(
            "strategy = \"cluster_dba\"",
            "strategy = \"cluster_dba\"\ndistance_source = \"model\"",
        );
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert!(format!("{err}").contains("attack.model_path"));
    }

    #[test]
    fn equal_budget_rescales_by_strategy() {
        let mut config = ExperimentConfig::from_toml_str(BASE).unwrap();
        config.attack.equal_budget = true;
        config.attack.poison_fraction = 0.2;
        config.attack.num_clusters = 2;
        // 4 attackers, K = 2.
        config.attack.strategy = AttackStrategy::ClusterDba;
        assert_eq!(config.effective_poison_fraction(), 0.2);
        config.attack.strategy = AttackStrategy::NaiveDba;
        assert_eq!(config.effective_poison_fraction(), 0.4);
        config.attack.strategy = AttackStrategy::Centralized;
        assert!((config.effective_poison_fraction() - 0.1).abs() < 1e-15);
        config.attack.equal_budget = false;
        assert_eq!(config.effective_poison_fraction(), 0.2);
    }

    #[test]
    fn inputs_resolve() {
        let config = ExperimentConfig::from_toml_str(BASE).unwrap();
        let inputs = config.build_inputs().unwrap();
        assert_eq!(inputs.topology.node_count(), 12);
        assert_eq!(inputs.shards.len(), 12);
        assert_eq!(inputs.num_classes, 4);
        assert_eq!(inputs.test_set.len(), 80); // 4 classes x 20 per class
        assert_eq!(inputs.plan.attackers.ids(), &[0, 1, 6, 7]);
    }

    #[test]
    fn mnist_spec_reports_unavailable_cleanly() {
        let spec = DatasetSpec::MnistSubset {
            dir: PathBuf::from("/nonexistent"),
            train_size: 10,
            test_size: 10,
        };
        assert!(!spec.available());
        assert!(spec.load(0).is_err());
        assert_eq!(spec.num_classes(), 10);
        assert_eq!(spec.side(), 28);
    }
}
