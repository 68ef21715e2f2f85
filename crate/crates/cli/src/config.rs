//! Run configuration: a TOML document with one table per concern.

use std::path::Path;

use serde::{Deserialize, Serialize};
use synthlab_core::lab::EnsembleKind;
use synthlab_core::rng::derive_seed;
use synthlab_core::SolverSettings;

use crate::CliError;

// counters for seeds derived from the master seed
const SEED_DICTIONARY: u64 = 11;
const SEED_SIGNAL: u64 = 12;
const SEED_WIDTH: u64 = 13;

/// Seeds are stored in TOML integers, which are signed 64-bit.
pub const MAX_SEED: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub full_scale: bool,
    pub out_dir: String,
    pub dictionary: DictionaryConfig,
    pub signal: SignalConfig,
    pub experiment: ExperimentConfig,
    pub solver: SolverConfig,
    pub width: WidthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 1,
            full_scale: false,
            out_dir: "out".into(),
            dictionary: DictionaryConfig::default(),
            signal: SignalConfig::default(),
            experiment: ExperimentConfig::default(),
            solver: SolverConfig::default(),
            width: WidthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictKind {
    Identity,
    DupIdentity,
    Gaussian,
    Haar,
    ConvPair,
    Superres,
    Tv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionaryConfig {
    pub kind: DictKind,
    pub n: usize,
    /// Gaussian only; 0 means `2n`.
    pub d: usize,
    pub levels: usize,
    /// Superres kernel width; 0 scales the default with `n`.
    pub sigma: f64,
    pub normalize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig {
            kind: DictKind::Identity,
            n: 16,
            d: 0,
            levels: 3,
            sigma: 0.0,
            normalize: false,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Random,
    TwoBlocks,
    OppositeSpikes,
    Endpoint,
    TvJumps,
}

impl SignalKind {
    /// Recipes that produce a signal rather than coefficients.
    pub fn is_signal(self) -> bool {
        matches!(self, SignalKind::Endpoint | SignalKind::TvJumps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepresenterKind {
    /// Coefficients as drawn; signals get `maximal` (endpoint) or `gradient` (tv-jumps).
    Auto,
    AsIs,
    Bp,
    Maximal,
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub kind: SignalKind,
    pub s: usize,
    /// Two-blocks only; defaults to the last block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    pub a: f64,
    pub b: f64,
    pub jumps: usize,
    pub representer: RepresenterKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            kind: SignalKind::Random,
            s: 2,
            block: None,
            a: 2.0,
            b: 0.5,
            jumps: 4,
            representer: RepresenterKind::Auto,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// One reference vector from `[signal]`.
    Fixed,
    /// Random supports over the sparsity grid.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: PhaseMode,
    pub ensemble: String,
    pub m_min: usize,
    /// 0 means `n`.
    pub m_max: usize,
    pub m_step: usize,
    pub trials: usize,
    pub s_min: usize,
    pub s_max: usize,
    pub s_step: usize,
    pub signals: usize,
    pub repetitions: usize,
    /// Noise sweep measurements; 0 means `ceil(statdim) + 40`.
    pub m: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_step: f64,
    /// Geometry sweep over `n`; empty means `dictionary.n` only.
    pub n_values: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: PhaseMode::Fixed,
            ensemble: "gaussian".into(),
            m_min: 1,
            m_max: 0,
            m_step: 1,
            trials: 5,
            s_min: 1,
            s_max: 4,
            s_step: 1,
            signals: 5,
            repetitions: 5,
            m: 0,
            eta_min: 0.0,
            eta_max: 1.0,
            eta_step: 0.05,
            n_values: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub penalty: f64,
    pub over_relaxation: f64,
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub cert_tol: f64,
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverConfig {
            max_iters: s.max_iters,
            abs_tol: s.abs_tol,
            rel_tol: s.rel_tol,
            penalty: s.penalty,
            over_relaxation: s.over_relaxation,
            feas_tol: s.feas_tol,
            opt_tol: s.opt_tol,
            cert_tol: s.cert_tol,
            polish: s.polish,
        }
    }
}

impl SolverConfig {
    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            max_iters: self.max_iters,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            penalty: self.penalty,
            over_relaxation: self.over_relaxation,
            feas_tol: self.feas_tol,
            opt_tol: self.opt_tol,
            cert_tol: self.cert_tol,
            polish: self.polish,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WidthConfig {
    /// Monte-Carlo samples per statistical dimension; 0 skips the estimate.
    pub samples: usize,
    /// Noisy solves behind the lambda_min upper bound; 0 skips it.
    pub lambda_perturbations: usize,
    /// Deviation parameter in the sampling-rate prediction.
    pub u: f64,
    pub c_const: f64,
    pub gamma: f64,
    /// Tolerance of the circumcenter certificate.
    pub cert_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for WidthConfig {
    fn default() -> Self {
        WidthConfig {
            samples: synthlab_core::width::DEFAULT_SAMPLES,
            lambda_perturbations: synthlab_core::width::DEFAULT_LAMBDA_PERTURBATIONS,
            u: 0.0,
            c_const: 1.0,
            gamma: 1.0,
            cert_tol: 1e-8,
            seed: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn grid(lo: usize, hi: usize, step: usize) -> Vec<usize> {
    (lo..=hi).step_by(step.max(1)).collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Accepts a bare config or a manifest, whose `[config]` table is used.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let body = match table.get("config") {
            Some(toml::Value::Table(inner)) if table.contains_key("command") => inner.clone(),
            _ => table,
        };
        body.try_into().map_err(|e: toml::de::Error| bad(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fills in every seed left open, derived from the master seed.
    pub fn resolve_seeds(&mut self) {
        let m = self.master_seed;
        let derive = |tag| derive_seed(m, &[tag]) >> 1;
        self.dictionary.seed.get_or_insert_with(|| derive(SEED_DICTIONARY));
        self.signal.seed.get_or_insert_with(|| derive(SEED_SIGNAL));
        self.width.seed.get_or_insert_with(|| derive(SEED_WIDTH));
    }

    pub fn dictionary_seed(&self) -> u64 {
        self.dictionary.seed.expect("seeds resolved")
    }

    pub fn signal_seed(&self) -> u64 {
        self.signal.seed.expect("seeds resolved")
    }

    pub fn width_seed(&self) -> u64 {
        self.width.seed.expect("seeds resolved")
    }

    pub fn ensemble(&self) -> Result<EnsembleKind, CliError> {
        self.experiment.ensemble.parse().map_err(|e: synthlab_core::Error| bad(e.to_string()))
    }

    pub fn m_values(&self, n: usize) -> Vec<usize> {
        let e = &self.experiment;
        let hi = if e.m_max == 0 { n } else { e.m_max };
        grid(e.m_min, hi, e.m_step)
    }

    pub fn s_values(&self) -> Vec<usize> {
        let e = &self.experiment;
        grid(e.s_min, e.s_max, e.s_step)
    }

    pub fn n_values(&self) -> Vec<usize> {
        if self.experiment.n_values.is_empty() {
            vec![self.dictionary.n]
        } else {
            self.experiment.n_values.clone()
        }
    }

    /// `eta_min, eta_min + eta_step, …` up to `eta_max`, computed by index
    /// so the grid has no accumulated round-off.
    pub fn eta_values(&self) -> Vec<f64> {
        let e = &self.experiment;
        if e.eta_max <= e.eta_min || e.eta_step <= 0.0 {
            return vec![e.eta_min];
        }
        let count = ((e.eta_max - e.eta_min) / e.eta_step + 1e-9).floor() as usize;
        (0..=count).map(|i| e.eta_min + i as f64 * e.eta_step).collect()
    }

    /// Atom count of the dictionary built at ambient dimension `n`.
    pub fn atoms(&self, n: usize) -> usize {
        let dc = &self.dictionary;
        match dc.kind {
            DictKind::Identity | DictKind::Superres => n,
            DictKind::DupIdentity | DictKind::ConvPair => 2 * n,
            DictKind::Gaussian if dc.d == 0 => 2 * n,
            DictKind::Gaussian => dc.d,
            DictKind::Haar => n * (dc.levels + 1),
            DictKind::Tv => n.saturating_sub(1),
        }
    }

    /// Referential checks that need no computation.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        for (name, seed) in [
            ("master_seed", Some(self.master_seed)),
            ("dictionary.seed", self.dictionary.seed),
            ("signal.seed", self.signal.seed),
            ("width.seed", self.width.seed),
        ] {
            if seed.is_some_and(|s| s > MAX_SEED) {
                return Err(bad(format!("{name} must be at most {MAX_SEED}")));
            }
        }
        self.solver.settings().validate().map_err(|e| bad(format!("[solver] {e}")))?;
        self.ensemble()?;
        let dc = &self.dictionary;
        if dc.kind == DictKind::Haar && dc.levels == 0 {
            return Err(bad("haar dictionary needs levels >= 1"));
        }
        let ns = self.n_values();
        if ns.contains(&0) {
            return Err(bad("n must be >= 1"));
        }
        let e = &self.experiment;
        let sig = &self.signal;
        for &n in &ns {
            let d = self.atoms(n);
            let uses_signal = !(command == Command::Phase && e.mode == PhaseMode::Full);
            if uses_signal
                && matches!(sig.kind, SignalKind::Random | SignalKind::TwoBlocks)
                && (sig.s == 0 || sig.s > d)
            {
                return Err(bad(format!("signal.s = {} outside 1..={d}", sig.s)));
            }
            if uses_signal && sig.kind == SignalKind::TwoBlocks {
                if !d.is_multiple_of(n) {
                    return Err(bad("two-blocks needs a dictionary made of n-column blocks"));
                }
                if let Some(b) = sig.block {
                    if b >= d / n {
                        return Err(bad(format!("signal.block = {b} outside 0..{}", d / n)));
                    }
                }
            }
            let ms = self.m_values(n);
            if command == Command::Phase {
                if ms.is_empty() || ms[0] == 0 || *ms.last().expect("nonempty") > n {
                    return Err(bad(format!("m grid must be a nonempty subset of 1..={n}")));
                }
                if e.mode == PhaseMode::Full {
                    let ss = self.s_values();
                    if ss.is_empty() || ss[0] == 0 || *ss.last().expect("nonempty") > d {
                        return Err(bad(format!("s grid must be a nonempty subset of 1..={d}")));
                    }
                    if e.signals == 0 || e.repetitions == 0 {
                        return Err(bad("signals and repetitions must be >= 1"));
                    }
                } else if e.trials == 0 {
                    return Err(bad("trials must be >= 1"));
                }
            }
            if command == Command::Noise {
                if e.m > n {
                    return Err(bad(format!("experiment.m = {} exceeds n = {n}", e.m)));
                }
                if e.trials == 0 {
                    return Err(bad("trials must be >= 1"));
                }
                if !(e.eta_min >= 0.0) || !e.eta_max.is_finite() {
                    return Err(bad("noise levels must be finite and >= 0"));
                }
            }
        }
        if command == Command::Noise && self.n_values().len() != 1 {
            return Err(bad("the noise sweep runs at a single n"));
        }
        if command == Command::Phase && self.n_values().len() != 1 {
            return Err(bad("the phase experiment runs at a single n"));
        }
        if sig_has_no_coefficients(sig) {
            return Err(bad(format!(
                "signal kind {:?} produces a signal; choose representer bp, maximal or gradient",
                sig.kind
            )));
        }
        if sig.representer == RepresenterKind::Gradient && sig.kind != SignalKind::TvJumps {
            return Err(bad("the gradient representer applies to tv-jumps only"));
        }
        if !(self.width.u >= 0.0) || !(self.width.cert_tol > 0.0) {
            return Err(bad("width.u must be >= 0 and width.cert_tol > 0"));
        }
        Ok(())
    }
}

fn sig_has_no_coefficients(sig: &SignalConfig) -> bool {
    sig.kind.is_signal() && sig.representer == RepresenterKind::AsIs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Phase,
    Noise,
    Geometry,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Phase => "phase",
            Command::Noise => "noise",
            Command::Geometry => "geometry",
        }
    }
}

/// One-line documentation of every key, used by `print-config`.
pub const KEY_DOCS: &[(&str, &str, &str)] = &[
    ("", "master_seed", "root of every derived seed (at most 2^63 - 1)"),
    ("", "full_scale", "true for paper-scale presets (hours of runtime)"),
    ("", "out_dir", "directory for the CSV and the manifest"),
    ("dictionary", "kind", "identity | dup-identity | gaussian | haar | conv-pair | superres | tv"),
    ("dictionary", "n", "signal dimension"),
    ("dictionary", "d", "gaussian atom count, 0 means 2n"),
    ("dictionary", "levels", "haar decomposition levels, d = n (levels + 1)"),
    ("dictionary", "sigma", "superres kernel width in samples, 0 means 10 n / 256"),
    ("dictionary", "normalize", "rescale every atom to unit norm"),
    ("dictionary", "seed", "gaussian dictionary seed, derived from master_seed when unset"),
    ("signal", "kind", "random | two-blocks | opposite-spikes | endpoint | tv-jumps"),
    ("signal", "s", "sparsity of random and two-blocks coefficients"),
    ("signal", "block", "two-blocks coefficient block, the last block when unset"),
    ("signal", "a", "endpoint signal x = a e_1 + b e_n, needs a > b > 0"),
    ("signal", "b", "see a"),
    ("signal", "jumps", "tv-jumps discontinuities"),
    ("signal", "representer", "auto | as-is | bp | maximal | gradient"),
    ("signal", "seed", "coefficient seed, derived from master_seed when unset"),
    ("experiment", "mode", "phase only: fixed (one z_ref) | full (random supports per s)"),
    ("experiment", "ensemble", "gaussian | rademacher measurements"),
    ("experiment", "m_min", "phase m grid start"),
    ("experiment", "m_max", "phase m grid end, 0 means n"),
    ("experiment", "m_step", "phase m grid stride"),
    ("experiment", "trials", "trials per m (fixed phase) or per eta (noise)"),
    ("experiment", "s_min", "full phase sparsity grid start"),
    ("experiment", "s_max", "full phase sparsity grid end"),
    ("experiment", "s_step", "full phase sparsity grid stride"),
    ("experiment", "signals", "full phase coefficient draws per s"),
    ("experiment", "repetitions", "full phase measurement draws per signal and m"),
    ("experiment", "m", "noise measurements, 0 means ceil(statdim) + 40"),
    ("experiment", "eta_min", "noise grid start"),
    ("experiment", "eta_max", "noise grid end"),
    ("experiment", "eta_step", "noise grid stride"),
    ("experiment", "n_values", "geometry sweep over n, empty means dictionary.n"),
    ("solver", "max_iters", "ADMM iteration cap"),
    ("solver", "abs_tol", "ADMM absolute stopping tolerance"),
    ("solver", "rel_tol", "ADMM relative stopping tolerance"),
    ("solver", "penalty", "initial augmented-Lagrangian penalty rho"),
    ("solver", "over_relaxation", "over-relaxation factor in [1, 1.9]"),
    ("solver", "feas_tol", "relative feasibility tolerance"),
    ("solver", "opt_tol", "relative objective tolerance"),
    ("solver", "cert_tol", "dual certificate slack"),
    ("solver", "polish", "support polishing with dual certificates"),
    ("width", "samples", "Monte-Carlo samples per statistical dimension, 0 skips it"),
    ("width", "lambda_perturbations", "noisy solves for the lambda_min upper bound, 0 skips it"),
    ("width", "u", "deviation parameter u in m0 = c^2 gamma^4 (w + u)^2 + 1"),
    ("width", "c_const", "ensemble constant c"),
    ("width", "gamma", "ensemble constant gamma"),
    ("width", "cert_tol", "circumcenter certificate tolerance"),
    ("width", "seed", "Monte-Carlo seed, derived from master_seed when unset"),
];

/// The config as TOML with each key preceded by its documentation and
/// default. Keys left unset appear commented out.
pub fn documented_toml(cfg: &RunConfig) -> String {
    let defaults: toml::Table = toml::from_str(&RunConfig::default().to_toml()).expect("table");
    let current: toml::Table = toml::from_str(&cfg.to_toml()).expect("table");
    let mut out = String::from("# synthlab run configuration\n");
    let tables = ["", "dictionary", "signal", "experiment", "solver", "width"];
    for table in tables {
        let (cur, def) = if table.is_empty() {
            (Some(&current), Some(&defaults))
        } else {
            (
                current.get(table).and_then(|v| v.as_table()),
                defaults.get(table).and_then(|v| v.as_table()),
            )
        };
        if !table.is_empty() {
            out.push_str(&format!("\n[{table}]\n"));
        }
        for &(t, key, doc) in KEY_DOCS.iter().filter(|(t, _, _)| *t == table) {
            debug_assert_eq!(t, table);
            let default = def
                .and_then(|d| d.get(key))
                .map(|v| v.to_string())
                .unwrap_or_else(|| "unset".into());
            out.push_str(&format!("# {doc} (default: {default})\n"));
            match cur.and_then(|c| c.get(key)) {
                Some(v) => out.push_str(&format!("{key} = {v}\n")),
                None => out.push_str(&format!("# {key} =\n")),
            }
        }
    }
    out
}
