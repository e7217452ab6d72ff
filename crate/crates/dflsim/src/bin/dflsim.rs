//! Config-driven experiment runner. All logic lives in the library; this
//! binary parses arguments, applies overrides, and maps errors to exit codes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dflsim::experiment::{
    load_preset, preset_names, run_bundle, run_pretrain, run_sweep, ExperimentConfig, Preset,
    PretrainConfig, SweepConfig,
};
use dflsim::{Error, Result};

#[derive(Parser)]
#[command(name = "dflsim", version, about = "Backdoor attacks on decentralized FL, at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (or a preset bundle) and write metrics CSVs.
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Train a distance-prediction model and write it with its MAE table.
    Pretrain {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a single-axis parameter sweep and aggregate the finals.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and validate a config, reporting its kind and hash.
    ValidateConfig {
        #[command(flatten)]
        source: Source,
    },
}

/// Exactly one of a config file or a built-in preset.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Path to a TOML config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see `validate-config --preset help`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct Overrides {
    /// Output directory (overrides the config's out_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed (overrides the config's seed).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, overrides } => run(source, overrides),
        Command::Pretrain { source, overrides } => pretrain(source, overrides),
        Command::Sweep { source, overrides } => sweep(source, overrides),
        Command::ValidateConfig { source } => validate(source),
    }
}

fn run(source: Source, overrides: Overrides) -> Result<()> {
    let entries = match source {
        Source { config: Some(path), .. } => {
            let config = ExperimentConfig::from_file(&path)?;
            config.validate()?;
            vec![(file_label(&path), config)]
        }
        Source { preset: Some(name), .. } => match load_preset(&name)? {
            Preset::Run(entries) => entries,
            Preset::Pretrain(_) => return Err(wrong_verb(&name, "pretrain")),
            Preset::Sweep(_) => return Err(wrong_verb(&name, "sweep")),
        },
        _ => unreachable!("clap enforces the group"),
    };
    let entries = apply_run_overrides(entries, &overrides);
    run_bundle(&entries)?;
    Ok(())
}

fn pretrain(source: Source, overrides: Overrides) -> Result<()> {
    let mut config = match source {
        Source { config: Some(path), .. } => {
            let config = PretrainConfig::from_file(&path)?;
            config.validate()?;
            config
        }
        Source { preset: Some(name), .. } => match load_preset(&name)? {
            Preset::Pretrain(config) => config,
            Preset::Run(_) => return Err(wrong_verb(&name, "run")),
            Preset::Sweep(_) => return Err(wrong_verb(&name, "sweep")),
        },
        _ => unreachable!("clap enforces the group"),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(out) = overrides.out {
        config.out_dir = out;
    }
    run_pretrain(&config)?;
    Ok(())
}

fn sweep(source: Source, overrides: Overrides) -> Result<()> {
    let mut config = match source {
        Source { config: Some(path), .. } => SweepConfig::from_file(&path)?,
        Source { preset: Some(name), .. } => match load_preset(&name)? {
            Preset::Sweep(config) => config,
            Preset::Run(_) => return Err(wrong_verb(&name, "run")),
            Preset::Pretrain(_) => return Err(wrong_verb(&name, "pretrain")),
        },
        _ => unreachable!("clap enforces the group"),
    };
    if let Some(seed) = overrides.seed {
        config.set_seed(seed);
    }
    if let Some(out) = overrides.out {
        config.set_out_dir(out);
    }
    run_sweep(&config)?;
    Ok(())
}

fn validate(source: Source) -> Result<()> {
    match source {
        Source { config: Some(path), .. } => {
            let text = std::fs::read_to_string(&path)?;
            match sniff_kind(&text)? {
                Kind::Sweep => {
                    let config = SweepConfig::from_toml_str(&text)?;
                    println!(
                        "sweep config ok: axis={}, {} sub-runs, base hash={}",
                        config.axis_name()?,
                        config.expand()?.len(),
                        config.base.config_hash()
                    );
                }
                Kind::Pretrain => {
                    let config = PretrainConfig::from_toml_str(&text)?;
                    config.validate()?;
                    println!("pretrain config ok: hash={}", config.config_hash());
                }
                Kind::Experiment => {
                    let config = ExperimentConfig::from_toml_str(&text)?;
                    config.validate()?;
                    println!("experiment config ok: hash={}", config.config_hash());
                }
            }
        }
        Source { preset: Some(name), .. } => {
            if name == "help" || name == "list" {
                println!("available presets: {}", preset_names().join(", "));
                return Ok(());
            }
            match load_preset(&name)? {
                Preset::Run(entries) => {
                    for (label, config) in &entries {
                        config.validate()?;
                        println!(
                            "preset {name} [{label}]: experiment config ok: hash={}",
                            config.config_hash()
                        );
                    }
                }
                Preset::Pretrain(config) => {
                    config.validate()?;
                    println!(
                        "preset {name}: pretrain config ok: hash={}",
                        config.config_hash()
                    );
                }
                Preset::Sweep(config) => {
                    println!(
                        "preset {name}: sweep config ok: axis={}, {} sub-runs, base hash={}",
                        config.axis_name()?,
                        config.expand()?.len(),
                        config.base.config_hash()
                    );
                }
            }
        }
        _ => unreachable!("clap enforces the group"),
    }
    Ok(())
}

enum Kind {
    Experiment,
    Pretrain,
    Sweep,
}

/// Decide which schema a file is written against by its top-level sections,
/// so diagnostics come from the right parser.
fn sniff_kind(text: &str) -> Result<Kind> {
    let value: toml::Value = toml::from_str(text).map_err(Error::config_from)?;
    let table = value
        .as_table()
        .ok_or_else(|| Error::config("top level is not a table"))?;
    if table.contains_key("sweep") {
        Ok(Kind::Sweep)
    } else if table.contains_key("pretrain") {
        Ok(Kind::Pretrain)
    } else {
        Ok(Kind::Experiment)
    }
}

fn apply_run_overrides(
    mut entries: Vec<(String, ExperimentConfig)>,
    overrides: &Overrides,
) -> Vec<(String, ExperimentConfig)> {
    if let Some(seed) = overrides.seed {
        for (_, config) in &mut entries {
            config.seed = seed;
        }
    }
    if let Some(out) = &overrides.out {
        if entries.len() == 1 {
            entries[0].1.out_dir = out.clone();
        } else {
            for (label, config) in &mut entries {
                config.out_dir = out.join(label.as_str());
            }
        }
    }
    entries
}

fn wrong_verb(name: &str, verb: &str) -> Error {
    Error::config(format!(
        "preset {name} is a {verb} config; invoke it as `dflsim {verb} --preset {name}`"
    ))
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("run")
        .to_string()
}
