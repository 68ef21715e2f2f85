//! Named recipes for the paper's figures. Desk scale shrinks `n` to 64 and
//! sparsities proportionally; full scale uses the original settings.

use crate::config::{
    Command, DictKind, PhaseMode, RepresenterKind, RunConfig, SignalKind,
};
use crate::CliError;

pub struct Preset {
    pub name: &'static str,
    pub command: Command,
    pub summary: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig1", command: Command::Phase, summary: "Haar phase transition over random supports" },
    Preset { name: "fig5", command: Command::Geometry, summary: "TV circumangle sweep over n" },
    Preset { name: "fig6a", command: Command::Phase, summary: "Haar, random support, coefficient recovery" },
    Preset { name: "fig6d", command: Command::Phase, summary: "Haar, two low-frequency blocks" },
    Preset { name: "fig6g", command: Command::Phase, summary: "Gaussian dictionary, random support" },
    Preset { name: "fig6j", command: Command::Phase, summary: "super-resolution, opposite spikes" },
    Preset { name: "fig7a", command: Command::Phase, summary: "Haar, random support, minimal representer" },
    Preset { name: "fig7b", command: Command::Phase, summary: "Haar, two blocks at a coarse scale, minimal representer" },
    Preset { name: "fig8a", command: Command::Noise, summary: "noise sweep on the fig6a setting" },
    Preset { name: "fig8b", command: Command::Noise, summary: "noise sweep on the fig6d setting" },
    Preset { name: "fig8c", command: Command::Noise, summary: "noise sweep on the fig6g setting" },
    Preset { name: "fig8d", command: Command::Noise, summary: "noise sweep on the fig6j setting" },
    Preset { name: "fig8e", command: Command::Noise, summary: "noise sweep on the fig7a setting" },
    Preset { name: "fig8f", command: Command::Noise, summary: "noise sweep on the fig7b setting" },
    Preset { name: "haar-coef", command: Command::Noise, summary: "alias of fig8a, H = {0, 0.05, ..., 1}" },
    Preset { name: "haar-sig", command: Command::Noise, summary: "alias of fig8e, H = {0, 0.005, ..., 0.1}" },
    Preset { name: "dup-identity", command: Command::Noise, summary: "duplicated identity, lambda_min = 0" },
];

const ALIASES: &[(&str, &str)] = &[
    ("1", "fig1"),
    ("5", "fig5"),
    ("fig6", "fig6a"),
    ("6a", "fig6a"),
    ("6d", "fig6d"),
    ("6g", "fig6g"),
    ("6j", "fig6j"),
    ("fig7", "fig7a"),
    ("fig8", "fig8a"),
    ("haar-coef", "fig8a"),
    ("haar-sig", "fig8e"),
];

pub fn canonical(name: &str) -> &str {
    ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map_or(name, |(_, c)| c)
}

pub fn lookup(name: &str) -> Result<&'static Preset, CliError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!("unknown preset '{name}'; known: {}", names.join(", ")))
    })
}

/// Desk sizes: `n = 64` and sparsities scaled by `64/256`.
struct Scale {
    n: usize,
    trials: usize,
    m_step: usize,
    full: bool,
}

impl Scale {
    fn new(full: bool) -> Self {
        if full {
            Scale { n: 256, trials: 100, m_step: 1, full }
        } else {
            Scale { n: 64, trials: 25, m_step: 2, full }
        }
    }

    fn sparsity(&self, paper: usize) -> usize {
        if self.full {
            paper
        } else {
            (paper * self.n).div_ceil(256)
        }
    }
}

fn haar(cfg: &mut RunConfig, sc: &Scale) {
    cfg.dictionary.kind = DictKind::Haar;
    cfg.dictionary.n = sc.n;
    cfg.dictionary.levels = 3;
}

fn phase_fixed(cfg: &mut RunConfig, sc: &Scale) {
    cfg.experiment.mode = PhaseMode::Fixed;
    cfg.experiment.m_min = sc.m_step;
    cfg.experiment.m_max = 0;
    cfg.experiment.m_step = sc.m_step;
    cfg.experiment.trials = sc.trials;
}

fn noise(cfg: &mut RunConfig, sc: &Scale, eta_max: f64, eta_step: f64) {
    cfg.experiment.m = 0;
    cfg.experiment.trials = sc.trials;
    cfg.experiment.eta_min = 0.0;
    cfg.experiment.eta_max = eta_max;
    cfg.experiment.eta_step = eta_step;
}

fn random_support(cfg: &mut RunConfig, s: usize, representer: RepresenterKind) {
    cfg.signal.kind = SignalKind::Random;
    cfg.signal.s = s;
    cfg.signal.representer = representer;
}

fn two_blocks(cfg: &mut RunConfig, s: usize, block: usize, representer: RepresenterKind) {
    cfg.signal.kind = SignalKind::TwoBlocks;
    cfg.signal.s = s;
    cfg.signal.block = Some(block);
    cfg.signal.representer = representer;
}

/// Settings of the four coefficient-recovery examples, indexed 0..4.
fn coef_example(cfg: &mut RunConfig, sc: &Scale, which: usize, representer: RepresenterKind) {
    let s = sc.sparsity(16);
    match which {
        0 => {
            haar(cfg, sc);
            random_support(cfg, s, representer);
        }
        // block 3 holds the coarsest scaling atoms
        1 => {
            haar(cfg, sc);
            two_blocks(cfg, s, 3, representer);
        }
        2 => {
            cfg.dictionary.kind = DictKind::Gaussian;
            cfg.dictionary.n = sc.n;
            cfg.dictionary.d = 2 * sc.n;
            random_support(cfg, s, representer);
        }
        _ => {
            cfg.dictionary.kind = DictKind::Superres;
            cfg.dictionary.n = sc.n;
            cfg.signal.kind = SignalKind::OppositeSpikes;
            cfg.signal.representer = representer;
        }
    }
}

/// Signal-recovery examples: random support and two blocks in the coarsest
/// detail scale, both replaced by a minimal representer.
fn sig_example(cfg: &mut RunConfig, sc: &Scale, which: usize) {
    haar(cfg, sc);
    let s = sc.sparsity(35);
    if which == 0 {
        random_support(cfg, s, RepresenterKind::Bp);
    } else {
        two_blocks(cfg, s, 2, RepresenterKind::Bp);
    }
}

pub fn build(name: &str, full: bool) -> Result<(Command, RunConfig), CliError> {
    let preset = lookup(canonical(name))?;
    let sc = Scale::new(full);
    let mut cfg = RunConfig {
        full_scale: full,
        ..RunConfig::default()
    };
    match preset.name {
        "fig1" => {
            haar(&mut cfg, &sc);
            let e = &mut cfg.experiment;
            e.mode = PhaseMode::Full;
            e.m_min = sc.m_step;
            e.m_max = 0;
            e.m_step = sc.m_step;
            if full {
                (e.s_min, e.s_max, e.signals) = (1, 125, 500);
            } else {
                (e.s_min, e.s_max, e.signals) = (2, 24, 5);
            }
            e.s_step = 1;
            e.repetitions = 5;
        }
        "fig5" => {
            cfg.dictionary.kind = DictKind::Tv;
            cfg.signal.kind = SignalKind::TvJumps;
            cfg.signal.jumps = 4;
            cfg.signal.representer = RepresenterKind::Gradient;
            cfg.experiment.n_values = if full {
                (1..=20).map(|k| 500 * k).collect()
            } else {
                vec![128, 256, 512, 1024, 2048]
            };
            cfg.dictionary.n = cfg.experiment.n_values[0];
            // the figure only needs the circumangle
            cfg.width.samples = 0;
            cfg.width.lambda_perturbations = 0;
        }
        "fig6a" | "fig6d" | "fig6g" | "fig6j" => {
            let which = ["fig6a", "fig6d", "fig6g", "fig6j"]
                .iter()
                .position(|p| *p == preset.name)
                .expect("listed");
            coef_example(&mut cfg, &sc, which, RepresenterKind::AsIs);
            phase_fixed(&mut cfg, &sc);
        }
        "fig7a" | "fig7b" => {
            sig_example(&mut cfg, &sc, usize::from(preset.name == "fig7b"));
            phase_fixed(&mut cfg, &sc);
        }
        "fig8a" | "fig8b" | "fig8c" | "fig8d" => {
            let which = ["fig8a", "fig8b", "fig8c", "fig8d"]
                .iter()
                .position(|p| *p == preset.name)
                .expect("listed");
            coef_example(&mut cfg, &sc, which, RepresenterKind::Bp);
            noise(&mut cfg, &sc, 1.0, 0.05);
        }
        "fig8e" | "fig8f" => {
            sig_example(&mut cfg, &sc, usize::from(preset.name == "fig8f"));
            noise(&mut cfg, &sc, 0.1, 0.005);
        }
        "dup-identity" => {
            cfg.dictionary.kind = DictKind::DupIdentity;
            cfg.dictionary.n = if full { 256 } else { 64 };
            random_support(&mut cfg, sc.sparsity(16), RepresenterKind::AsIs);
            noise(&mut cfg, &sc, 1.0, 0.05);
        }
        other => unreachable!("preset {other} has no recipe"),
    }
    Ok((preset.command, cfg))
}
