//! Single-axis parameter sweeps over a base experiment: one sub-run per
//! value, aggregated into `axis_value,final_asr,final_acc`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::run::{run_experiment, RunOutput};

pub const SWEEP_FILE: &str = "sweep.csv";

/// The one parameter a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    TriggerSize,
    TriggerGap,
    TriggerShift,
    NumClusters,
    DistanceError,
}

impl SweepAxis {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "trigger_size" => Ok(SweepAxis::TriggerSize),
            "trigger_gap" => Ok(SweepAxis::TriggerGap),
            "trigger_shift" => Ok(SweepAxis::TriggerShift),
            "num_clusters" => Ok(SweepAxis::NumClusters),
            "distance_error" => Ok(SweepAxis::DistanceError),
            other => Err(Error::config(format!(
                "sweep.axis: unknown axis {other:?}; valid axes are trigger_size, \
                 trigger_gap, trigger_shift, num_clusters, distance_error"
            ))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SweepAxis::TriggerSize => "trigger_size",
            SweepAxis::TriggerGap => "trigger_gap",
            SweepAxis::TriggerShift => "trigger_shift",
            SweepAxis::NumClusters => "num_clusters",
            SweepAxis::DistanceError => "distance_error",
        }
    }
}

/// One concrete value along the axis.
#[derive(Debug, Clone, PartialEq)]
enum AxisValue {
    Count(usize),
    Error(f64),
    Shift(usize, usize),
}

impl AxisValue {
    fn label(&self) -> String {
        match self {
            AxisValue::Count(v) => v.to_string(),
            AxisValue::Error(v) => format!("{v}"),
            AxisValue::Shift(r, c) => format!("{r}:{c}"),
        }
    }
}

/// `axis` accepts a bare string; an array is accepted syntactically so the
/// "one axis only" rule can produce a proper diagnostic instead of a type
/// error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: OneOrMany,
    values: Vec<toml::Value>,
}

/// A sweep file: a `[sweep]` section plus the full base experiment under
/// `[base]`. Sub-runs write to `<base.out_dir>/<axis>_<value>/`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    sweep: SweepSection,
    pub base: ExperimentConfig,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SweepConfig = toml::from_str(text).map_err(Error::config_from)?;
        config.plan()?; // validates axis and values
        config.base.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path.as_ref())?)
    }

    pub fn axis_name(&self) -> Result<&str> {
        Ok(self.plan()?.0.name())
    }

    /// Seed override for the whole sweep (applied to the base).
    pub fn set_seed(&mut self, seed: u64) {
        self.base.seed = seed;
    }

    pub fn set_out_dir(&mut self, out: PathBuf) {
        self.base.out_dir = out;
    }

    pub fn out_dir(&self) -> &Path {
        &self.base.out_dir
    }

    fn plan(&self) -> Result<(SweepAxis, Vec<AxisValue>)> {
        let axis = match &self.sweep.axis {
            OneOrMany::One(name) => SweepAxis::parse(name)?,
            OneOrMany::Many(names) if names.len() == 1 => SweepAxis::parse(&names[0])?,
            OneOrMany::Many(names) => {
                return Err(Error::config(format!(
                    "sweep.axis: exactly one axis may vary, got {}: {names:?}",
                    names.len()
                )))
            }
        };
        if self.sweep.values.is_empty() {
            return Err(Error::config("sweep.values: empty"));
        }
        let values = self
            .sweep
            .values
            .iter()
            .map(|v| parse_value(axis, v))
            .collect::<Result<Vec<_>>>()?;
        Ok((axis, values))
    }

    /// Expand into labelled sub-configs (the sweep's unit of execution).
    pub fn expand(&self) -> Result<Vec<(String, ExperimentConfig)>> {
        let (axis, values) = self.plan()?;
        let mut out = Vec::with_capacity(values.len());
        for value in values {
            let mut config = self.base.clone();
            match (axis, &value) {
                (SweepAxis::TriggerSize, AxisValue::Count(v)) => config.trigger.size = *v,
                (SweepAxis::TriggerGap, AxisValue::Count(v)) => config.trigger.gap = *v,
                (SweepAxis::TriggerShift, AxisValue::Shift(r, c)) => {
                    config.trigger.shift = (*r, *c)
                }
                (SweepAxis::NumClusters, AxisValue::Count(v)) => config.attack.num_clusters = *v,
                (SweepAxis::DistanceError, AxisValue::Error(v)) => {
                    config.attack.distance_error = *v
                }
                _ => unreachable!("parse_value matched the axis"),
            }
            let label = format!("{}_{}", axis.name(), value.label().replace(':', "_"));
            config.out_dir = self.base.out_dir.join(&label);
            config
                .validate()
                .map_err(|e| Error::config(format!("sweep value {}: {e}", value.label())))?;
            out.push((value.label(), config));
        }
        Ok(out)
    }
}

fn parse_value(axis: SweepAxis, value: &toml::Value) -> Result<AxisValue> {
    let bad = |want: &str| {
        Error::config(format!(
            "sweep.values: {} takes {want}, got `{value}`",
            axis.name()
        ))
    };
    match axis {
        SweepAxis::TriggerSize | SweepAxis::TriggerGap | SweepAxis::NumClusters => value
            .as_integer()
            .filter(|v| *v >= 0)
            .map(|v| AxisValue::Count(v as usize))
            .ok_or_else(|| bad("a non-negative integer")),
        SweepAxis::DistanceError => match value {
            toml::Value::Integer(v) if *v >= 0 => Ok(AxisValue::Error(*v as f64)),
            toml::Value::Float(v) if *v >= 0.0 => Ok(AxisValue::Error(*v)),
            _ => Err(bad("a non-negative number")),
        },
        SweepAxis::TriggerShift => {
            let arr = value.as_array().ok_or_else(|| bad("a [row, col] pair"))?;
            if arr.len() != 2 {
                return Err(bad("a [row, col] pair"));
            }
            let coord = |v: &toml::Value| v.as_integer().filter(|x| *x >= 0);
            match (coord(&arr[0]), coord(&arr[1])) {
                (Some(r), Some(c)) => Ok(AxisValue::Shift(r as usize, c as usize)),
                _ => Err(bad("a [row, col] pair of non-negative integers")),
            }
        }
    }
}

#[derive(Debug)]
pub struct SweepOutput {
    pub csv_path: PathBuf,
    pub runs: Vec<RunOutput>,
}

/// Run every sub-experiment in sequence and aggregate the finals.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    let entries = config.expand()?;
    let mut csv = String::from("axis_value,final_asr,final_acc\n");
    let mut runs = Vec::with_capacity(entries.len());
    for (label, sub) in &entries {
        let result = run_experiment(sub, label)?;
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        csv.push_str(&format!(
            "{label},{},{}\n",
            cell(result.final_asr),
            cell(result.final_acc)
        ));
        runs.push(result);
    }
    fs::create_dir_all(config.out_dir())?;
    let csv_path = config.out_dir().join(SWEEP_FILE);
    fs::write(&csv_path, &csv)?;
    println!("sweep aggregated at {}", csv_path.display());
    Ok(SweepOutput { csv_path, runs })
}
