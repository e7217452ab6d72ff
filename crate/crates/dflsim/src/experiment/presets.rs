//! Named, in-repo experiment presets. Each maps to one or more embedded
//! config files so headline comparisons are a single command; the same
//! files under `presets/` can be copied and edited as starting points.

use crate::attack::AttackStrategy;
use crate::error::{Error, Result};
use crate::sim::Protocol;

use super::config::{DatasetSpec, ExperimentConfig};
use super::pretrain::PretrainConfig;
use super::sweep::SweepConfig;

const SANITY: &str = include_str!("../../presets/sanity.toml");
const MOTIVATION_UNIFORM: &str = include_str!("../../presets/motivation_fig2_uniform.toml");
const MOTIVATION_ADJACENT: &str = include_str!("../../presets/motivation_fig2_adjacent.toml");
const ASR_COMPARISON: &str = include_str!("../../presets/asr_comparison.toml");
const PRETRAIN_RING: &str = include_str!("../../presets/pretrain_ring.toml");
const PAPER_SCALE: &str = include_str!("../../presets/paper_scale.toml");
const SWEEP_TRIGGER_SIZE: &str = include_str!("../../presets/sweep_trigger_size.toml");
const SWEEP_TRIGGER_GAP: &str = include_str!("../../presets/sweep_trigger_gap.toml");
const SWEEP_TRIGGER_SHIFT: &str = include_str!("../../presets/sweep_trigger_shift.toml");
const SWEEP_CLUSTERS: &str = include_str!("../../presets/sweep_clusters.toml");
const SWEEP_DISTANCE_ERROR: &str = include_str!("../../presets/sweep_distance_error.toml");

/// What a preset expands to; dispatched by the matching CLI verb.
pub enum Preset {
    /// One or more labelled experiments (bundles compare their sub-runs).
    Run(Vec<(String, ExperimentConfig)>),
    Pretrain(PretrainConfig),
    Sweep(SweepConfig),
}

pub fn preset_names() -> &'static [&'static str] {
    &[
        "sanity",
        "motivation_fig2",
        "motivation_fig2_uniform",
        "motivation_fig2_adjacent",
        "asr_comparison",
        "pretrain_ring",
        "paper_scale",
        "sweep_trigger_size",
        "sweep_trigger_gap",
        "sweep_trigger_shift",
        "sweep_clusters",
        "sweep_distance_error",
    ]
}

pub fn load_preset(name: &str) -> Result<Preset> {
    match name {
        "sanity" => single("sanity", SANITY),
        "motivation_fig2" => Ok(Preset::Run(vec![
            (
                "uniform".into(),
                ExperimentConfig::from_toml_str(MOTIVATION_UNIFORM)?,
            ),
            (
                "adjacent".into(),
                ExperimentConfig::from_toml_str(MOTIVATION_ADJACENT)?,
            ),
        ])),
        "motivation_fig2_uniform" => single("uniform", MOTIVATION_UNIFORM),
        "motivation_fig2_adjacent" => single("adjacent", MOTIVATION_ADJACENT),
        "asr_comparison" => asr_comparison(),
        "pretrain_ring" => Ok(Preset::Pretrain(PretrainConfig::from_toml_str(
            PRETRAIN_RING,
        )?)),
        "paper_scale" => single("paper_scale", PAPER_SCALE),
        "sweep_trigger_size" => sweep(SWEEP_TRIGGER_SIZE),
        "sweep_trigger_gap" => sweep(SWEEP_TRIGGER_GAP),
        "sweep_trigger_shift" => sweep(SWEEP_TRIGGER_SHIFT),
        "sweep_clusters" => sweep(SWEEP_CLUSTERS),
        "sweep_distance_error" => sweep(SWEEP_DISTANCE_ERROR),
        other => Err(Error::config(format!(
            "unknown preset {other:?}; available: {}",
            preset_names().join(", ")
        ))),
    }
}

fn single(label: &str, text: &str) -> Result<Preset> {
    Ok(Preset::Run(vec![(
        label.to_string(),
        ExperimentConfig::from_toml_str(text)?,
    )]))
}

fn sweep(text: &str) -> Result<Preset> {
    Ok(Preset::Sweep(SweepConfig::from_toml_str(text)?))
}

/// 3 strategies x {dpsgd, async} x {synthetic, mnist}, all sharing the same
/// equal-budget base so final ASRs are comparable.
fn asr_comparison() -> Result<Preset> {
    let base = ExperimentConfig::from_toml_str(ASR_COMPARISON)?;
    let root = base.out_dir.clone();
    let mut entries = Vec::new();
    for (strategy, s_name) in [
        (AttackStrategy::Centralized, "centralized"),
        (AttackStrategy::NaiveDba, "naive_dba"),
        (AttackStrategy::ClusterDba, "cluster_dba"),
    ] {
        for (protocol, p_name) in [
            (Protocol::Dpsgd, "dpsgd"),
            (Protocol::AsyncGossip, "async"),
        ] {
            for mnist in [false, true] {
                let mut config = base.clone();
                config.attack.strategy = strategy;
                config.sim.protocol = protocol;
                if mnist {
                    config.dataset = DatasetSpec::MnistSubset {
                        dir: "data/mnist".into(),
                        train_size: 4000,
                        test_size: 1000,
                    };
                }
                let d_name = if mnist { "mnist" } else { "synthetic" };
                let label = format!("{s_name}_{p_name}_{d_name}");
                config.out_dir = root.join(&label);
                config.validate()?;
                entries.push((label, config));
            }
        }
    }
    Ok(Preset::Run(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for name in preset_names() {
            let preset = load_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            match preset {
                Preset::Run(entries) => {
                    assert!(!entries.is_empty(), "{name} has no entries");
                    for (label, config) in &entries {
                        config.validate().unwrap_or_else(|e| panic!("{label}: {e}"));
                        assert!(!config.config_hash().is_empty());
                    }
                }
                Preset::Pretrain(config) => config.validate().unwrap(),
                Preset::Sweep(config) => {
                    assert!(!config.expand().unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn unknown_preset_lists_options() {
        let err = load_preset("nope").err().unwrap();
        let msg = format!("{err}");
        assert!(msg.contains("sanity") && msg.contains("paper_scale"));
    }

    #[test]
    fn asr_comparison_has_twelve_distinct_subruns() {
        let Preset::Run(entries) = load_preset("asr_comparison").unwrap() else {
            panic!("wrong preset kind");
        };
        assert_eq!(entries.len(), 12);
        let labels: std::collections::BTreeSet<&str> =
            entries.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels.len(), 12);
        let dirs: std::collections::BTreeSet<_> =
            entries.iter().map(|(_, c)| c.out_dir.clone()).collect();
        assert_eq!(dirs.len(), 12);
    }

    #[test]
    fn bundle_subruns_share_seed_for_paired_comparison() {
        let Preset::Run(entries) = load_preset("motivation_fig2").unwrap() else {
            panic!("wrong preset kind");
        };
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].1.seed, entries[1].1.seed);
        assert_ne!(entries[0].1.attack.attackers, entries[1].1.attack.attackers);
    }
}
