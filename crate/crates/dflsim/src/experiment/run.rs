//! Executing one experiment config end to end: refuse accidental overwrites,
//! run the simulation, flush the metrics CSV plus a sidecar (even on
//! failure), and print the summary line.

use std::fs;
use std::path::{Path, PathBuf};

use crate::attack::AttackStrategy;
use crate::error::{Error, Result};
use crate::rng;
use crate::sim::SimEngine;

use super::config::ExperimentConfig;

pub const METRICS_FILE: &str = "metrics.csv";
pub const SIDECAR_FILE: &str = "run.meta";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub out_dir: PathBuf,
    pub csv_path: PathBuf,
    pub config_hash: String,
    pub final_asr: Option<f64>,
    pub final_acc: Option<f64>,
}

/// Pull the recorded config hash out of a sidecar file, if it has one.
pub fn sidecar_hash(path: &Path) -> Option<String> {
    let text = fs::read_to_string(path).ok()?;
    text.lines()
        .find_map(|l| l.strip_prefix("config_hash = "))
        .map(|h| h.trim().to_string())
}

/// A directory holding results of a *different* config must not be clobbered;
/// re-running the identical config is a reproduction and is allowed.
fn refuse_foreign_overwrite(out_dir: &Path, hash: &str) -> Result<()> {
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
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "n/a".into(),
    }
}

/// Run one experiment into `config.out_dir`. The metrics CSV and sidecar are
/// written even when the simulation fails mid-run, so partial results stay
/// inspectable; the error is then propagated.
pub fn run_experiment(config: &ExperimentConfig, label: &str) -> Result<RunOutput> {
    let hash = config.config_hash();
    let out_dir = config.out_dir.clone();
    refuse_foreign_overwrite(&out_dir, &hash)?;
    fs::create_dir_all(&out_dir)?;

    let inputs = config.build_inputs()?;
    let topology_hash = inputs.topology.content_hash();
    let attacker_ids = inputs.plan.attackers.ids().to_vec();

    let mut engine = SimEngine::new(
        inputs.topology,
        inputs.shards,
        inputs.test_set,
        inputs.plan,
        inputs.defense,
        inputs.sim,
        inputs.num_classes,
        inputs.seed,
    )?;
    // Post-construction: the engine may retarget signature pseudo-labels
    // against the shared init, so read them back from its plan.
    let pseudo_labels: Vec<(usize, usize)> = attacker_ids
        .iter()
        .filter_map(|&id| {
            engine
                .plan()
                .attackers
                .signature(id)
                .map(|s| (id, s.pseudo_label))
        })
        .collect();
    let run_result = engine.run();

    let csv = engine.log().to_csv();
    let csv_path = out_dir.join(METRICS_FILE);
    fs::write(&csv_path, &csv)?;

    let final_asr = engine.log().final_mean_asr(&attacker_ids);
    let final_acc = engine.log().final_mean_acc();
    let status = match &run_result {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("failed: {e}"),
    };

    let mut meta = String::new();
    meta.push_str(&format!("config_hash = {hash}\n"));
    meta.push_str(&format!("label = {label}\n"));
    meta.push_str(&format!("seed = {}\n", config.seed));
    meta.push_str(&format!("topology_hash = {topology_hash}\n"));
    meta.push_str(&format!("defense = {}\n", config.defense.describe()));
    meta.push_str(&format!("status = {status}\n"));
    meta.push_str(&format!(
        "csv_sha256 = {}\n",
        rng::sha256_hex(csv.as_bytes())
    ));
    meta.push_str(&format!("final_mean_asr = {}\n", fmt_opt(final_asr)));
    meta.push_str(&format!("final_mean_acc = {}\n", fmt_opt(final_acc)));
    if config.attack.strategy == AttackStrategy::ClusterDba {
        let labels: Vec<String> = pseudo_labels
            .iter()
            .map(|(id, l)| format!("{id}:{l}"))
            .collect();
        meta.push_str(&format!(
            "signature_pseudo_labels = {}\n",
            labels.join(" ")
        ));
        if let Some(clusters) = engine.clusters() {
            meta.push_str("\n[clusters]\n");
            meta.push_str(&clusters.to_text());
        }
        if let Some(matrix) = engine.distance_matrix() {
            meta.push_str("\n[distance_matrix]\n");
            meta.push_str(&matrix.to_text());
        }
    }
    meta.push_str("\n[config]\n");
    meta.push_str(&config.to_canonical_toml());
    fs::write(out_dir.join(SIDECAR_FILE), meta)?;

    println!(
        "[{label}] final_mean_asr={} final_mean_acc={} ({})",
        fmt_opt(final_asr),
        fmt_opt(final_acc),
        csv_path.display()
    );

    run_result?;
    Ok(RunOutput {
        label: label.to_string(),
        out_dir,
        csv_path,
        config_hash: hash,
        final_asr,
        final_acc,
    })
}

/// Run a labelled set of experiments in sequence (presets that compare
/// placements or strategies expand to these). Sub-runs whose dataset files
/// are missing are reported and skipped rather than failing the whole bundle.
pub fn run_bundle(entries: &[(String, ExperimentConfig)]) -> Result<Vec<RunOutput>> {
    let mut outputs = Vec::new();
    for (label, config) in entries {
        if !config.dataset.available() {
            println!("[{label}] skipped: dataset files not found");
            continue;
        }
        outputs.push(run_experiment(config, label)?);
    }
    if outputs.len() > 1 {
        println!("--- bundle summary ---");
        for o in &outputs {
            println!(
                "{:<40} asr={} acc={}",
                o.label,
                fmt_opt(o.final_asr),
                fmt_opt(o.final_acc)
            );
        }
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(out: &Path) -> ExperimentConfig {
        let text = format!(
            r#"
seed = 5
out_dir = "{}"

[topology]
kind = "ring"
n = 6

[dataset]
kind = "synthetic"
classes = 3
side = 8
train_per_class = 30
test_per_class = 15

[sim]
protocol = "dpsgd"
total_rounds = 4
detection_rounds = 2
local_steps = 1
lr = 0.1
batch_size = 8
eval_subset = 30
eval_every = 2
hidden_dim = 8

[attack]
strategy = "cluster_dba"
attackers = [0, 3]
num_clusters = 2
poison_fraction = 0.5
target_label = 1

[trigger]
blocks = 2
size = 1
gap = 1
"#,
            out.display()
        );
        ExperimentConfig::from_toml_str(&text).unwrap()
    }

    #[test]
    fn writes_outputs_and_refuses_foreign_config() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run_a");
        let config = tiny_config(&out);
        let result = run_experiment(&config, "test").unwrap();
        assert!(result.csv_path.exists());
        let meta = fs::read_to_string(out.join(SIDECAR_FILE)).unwrap();
        assert!(meta.contains(&format!("config_hash = {}", result.config_hash)));
        assert!(meta.contains("status = ok"));
        assert!(meta.contains("[clusters]"));
        assert!(meta.contains("[distance_matrix]"));
        assert!(meta.contains("signature_pseudo_labels"));
        assert!(meta.contains("[config]"));
        assert!(result.final_asr.is_some());
        assert!(result.final_acc.is_some());

        // Identical rerun allowed, byte-identical CSV.
        let first_csv = fs::read(&result.csv_path).unwrap();
        run_experiment(&config, "test").unwrap();
        assert_eq!(fs::read(&result.csv_path).unwrap(), first_csv);

        // Different config into the same directory is refused.
        let mut other = config.clone();
        other.seed = 6;
        let err = run_experiment(&other, "test").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(format!("{err}").contains("refusing to overwrite"));
        // Original outputs untouched.
        assert_eq!(fs::read(&result.csv_path).unwrap(), first_csv);
    }

    #[test]
    fn bundle_runs_all_entries() {
        let dir = tempfile::tempdir().unwrap();
        let a = tiny_config(&dir.path().join("a"));
        let mut b = tiny_config(&dir.path().join("b"));
        b.attack.strategy = AttackStrategy::NaiveDba;
        let entries = vec![("a".to_string(), a), ("b".to_string(), b)];
        let outputs = run_bundle(&entries).unwrap();
        assert_eq!(outputs.len(), 2);
        assert!(outputs.iter().all(|o| o.csv_path.exists()));
    }

    #[test]
    fn bundle_skips_missing_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(&dir.path().join("m"));
        config.dataset = super::super::config::DatasetSpec::MnistSubset {
            dir: PathBuf::from("/nonexistent"),
            train_size: 10,
            test_size: 10,
        };
        let outputs = run_bundle(&[("m".to_string(), config)]).unwrap();
        assert!(outputs.is_empty());
    }
}
