//! Config-driven experiment harness: TOML experiment descriptions, named
//! presets, single runs with sidecar metadata, regressor pretraining, and
//! single-axis sweeps.

pub mod config;
pub mod presets;
pub mod pretrain;
pub mod run;
pub mod sweep;

pub use config::{
    AttackSection, DatasetSpec, DistanceSourceSpec, ExperimentConfig, ResolvedInputs,
    TriggerSection,
};
pub use presets::{load_preset, preset_names, Preset};
pub use pretrain::{run_pretrain, PretrainConfig, PretrainOutput};
pub use run::{run_bundle, run_experiment, RunOutput};
pub use sweep::{run_sweep, SweepConfig, SweepOutput};
