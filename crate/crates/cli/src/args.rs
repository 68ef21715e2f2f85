use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{documented_toml, Command, RunConfig};
use crate::{presets, CliError};

#[derive(Debug, Parser)]
#[command(name = "synthlab", version, about = "Phase transitions, noise sweeps and cone geometry for l1-synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Noiseless recovery rates over an m grid (writes phase.csv).
    Phase,
    /// Recovery errors over a grid of noise levels (writes noise.csv).
    Noise,
    /// Circumangle, statistical dimension and bounds (writes geometry.csv).
    Geometry,
    /// Print the resolved configuration with every key documented.
    PrintConfig,
    /// List the figure presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration (or a manifest from an earlier run).
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "figure")]
    pub config: Option<PathBuf>,
    /// Figure preset, e.g. fig1, fig6a, haar-coef.
    #[arg(long, global = true, value_name = "NAME")]
    pub figure: Option<String>,
    /// Desk-scale preset (the default).
    #[arg(long, global = true, conflicts_with = "full")]
    pub desk: bool,
    /// Paper-scale preset; expect hours of runtime.
    #[arg(long, global = true)]
    pub full: bool,
    /// Master seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// A configuration with overrides applied and seeds resolved.
pub struct Resolved {
    pub config: RunConfig,
    pub preset: Option<String>,
    pub preset_command: Option<Command>,
}

pub fn resolve(common: &Common) -> Result<Resolved, CliError> {
    let (mut config, preset, preset_command) = match (&common.config, &common.figure) {
        (Some(path), _) => (RunConfig::load(path)?, None, None),
        (None, Some(name)) => {
            let (cmd, cfg) = presets::build(name, common.full)?;
            (cfg, Some(name.clone()), Some(cmd))
        }
        (None, None) => (RunConfig::default(), None, None),
    };
    if common.full {
        config.full_scale = true;
    } else if common.desk {
        config.full_scale = false;
    }
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &common.out {
        config.out_dir = out.to_string_lossy().into_owned();
    }
    if config.master_seed > crate::config::MAX_SEED {
        return Err(CliError::Config(format!(
            "master_seed must be at most {}",
            crate::config::MAX_SEED
        )));
    }
    config.resolve_seeds();
    Ok(Resolved { config, preset, preset_command })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let command = match cli.command {
        Cmd::Phase => Command::Phase,
        Cmd::Noise => Command::Noise,
        Cmd::Geometry => Command::Geometry,
        Cmd::PrintConfig => {
            let r = resolve(&cli.common)?;
            print!("{}", documented_toml(&r.config));
            return Ok(());
        }
        Cmd::Presets => {
            for p in presets::PRESETS {
                println!("{:<13} {:<9} {}", p.name, p.command.name(), p.summary);
            }
            return Ok(());
        }
    };
    let r = resolve(&cli.common)?;
    if let (Some(name), Some(cmd)) = (&r.preset, r.preset_command) {
        if cmd != command {
            return Err(CliError::Config(format!(
                "preset '{name}' is a '{}' preset, not '{}'",
                cmd.name(),
                command.name()
            )));
        }
    }
    crate::commands::execute(command, &r.config, r.preset.as_deref())
}
