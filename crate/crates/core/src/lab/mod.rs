//! Phase-transition and noise-robustness experiments.
//!
//! Every trial draws its randomness from a seed derived from the master seed
//! and the trial's grid coordinates, so grids can be evaluated in parallel
//! and still serialize identically.

mod csv;

pub use csv::{write_noise_csv, write_phase_csv, NOISE_HEADER, PHASE_HEADER};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cone::descent_generators;
use crate::dict::{CoefVector, Dictionary};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, gaussian_matrix, rademacher_matrix, rng_from, unit_vector};
use crate::solve::{solve_bp_eq, solve_bp_ineq, SolverSettings};
use crate::width::{error_bound_signal, estimate_statdim, SamplingPrediction, WidthEstimate};
use crate::SUCCESS_THRESHOLD;

// stream tags for derive_seed
const TAG_SIGNAL: u64 = 1;
const TAG_TRIAL: u64 = 2;
const TAG_NOISE: u64 = 3;
const TAG_WIDTH: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Gaussian,
    Rademacher,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EnsembleKind::Gaussian),
            "rademacher" => Ok(EnsembleKind::Rademacher),
            other => Err(Error::Domain(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnsembleKind::Gaussian => "gaussian",
            EnsembleKind::Rademacher => "rademacher",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementEnsemble {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

pub fn draw_measurements(ens: &MeasurementEnsemble) -> Result<DMatrix<f64>> {
    if ens.m == 0 || ens.n == 0 {
        return Err(Error::Domain("measurement matrix needs m, n >= 1".into()));
    }
    let mut rng = rng_from(ens.seed, &[0x6d65_6173]);
    Ok(match ens.kind {
        EnsembleKind::Gaussian => gaussian_matrix(&mut rng, ens.m, ens.n),
        EnsembleKind::Rademacher => rademacher_matrix(&mut rng, ens.m, ens.n),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub m: usize,
    pub eta: f64,
    pub seed: u64,
    pub coef_err: f64,
    pub sig_err: f64,
    pub coef_success: bool,
    pub sig_success: bool,
    pub solver_converged: bool,
}

/// Seeds of one trial: the measurement matrix and the noise direction.
#[derive(Debug, Clone, Copy)]
pub struct TrialSeeds {
    pub ensemble: u64,
    pub noise: u64,
}

/// One measurement-and-recovery round with `y = A·D·z_ref + η·e`.
pub fn run_trial(
    dict: &Dictionary,
    z_ref: &CoefVector,
    m: usize,
    eta: f64,
    kind: EnsembleKind,
    seeds: TrialSeeds,
    settings: &SolverSettings,
) -> Result<TrialResult> {
    if z_ref.len() != dict.d() {
        return Err(Error::Domain("reference coefficients do not match dictionary".into()));
    }
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
    }
    let a = draw_measurements(&MeasurementEnsemble {
        kind,
        m,
        n: dict.n(),
        seed: seeds.ensemble,
    })?;
    let x_ref = dict.matrix() * z_ref.entries();
    let mut y = &a * &x_ref;
    if eta > 0.0 {
        let mut rng = rng_from(seeds.noise, &[0x6e6f_6973]);
        y += unit_vector(&mut rng, m) * eta;
    }
    let big_m = &a * dict.matrix();
    let (z_hat, converged) = match solve_bp_ineq(&big_m, &y, eta, settings) {
        Ok(sol) => (Some(sol.z.into_entries()), sol.converged),
        Err(e) => {
            log::warn!("trial m={m} eta={eta} seed={}: {e}", seeds.ensemble);
            (None, false)
        }
    };
    let (coef_err, sig_err) = match &z_hat {
        Some(z) => (
            (z_ref.entries() - z).norm(),
            (&x_ref - dict.matrix() * z).norm(),
        ),
        None => (f64::NAN, f64::NAN),
    };
    Ok(TrialResult {
        m,
        eta,
        seed: seeds.ensemble,
        coef_err,
        sig_err,
        coef_success: coef_err < SUCCESS_THRESHOLD,
        sig_success: sig_err < SUCCESS_THRESHOLD,
        solver_converged: converged,
    })
}

/// Success counts over an `s × m` grid.
#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub m_values: Vec<usize>,
    pub s_values: Vec<usize>,
    /// Indexed `[s][m]`.
    pub success_counts_coef: Vec<Vec<usize>>,
    pub success_counts_sig: Vec<Vec<usize>>,
    pub solver_failures: Vec<Vec<usize>>,
    pub trials_per_cell: usize,
    /// Mean `δ̂` and its standard error per `s`.
    pub overlay: Option<Vec<(f64, f64)>>,
    /// Every trial, ordered by `(s, m, trial)`.
    pub trials: Vec<TrialResult>,
}

impl PhaseGrid {
    fn from_trials(
        s_values: Vec<usize>,
        m_values: Vec<usize>,
        trials_per_cell: usize,
        trials: Vec<TrialResult>,
    ) -> Self {
        let (ns, nm) = (s_values.len(), m_values.len());
        let mut coef = vec![vec![0; nm]; ns];
        let mut sig = vec![vec![0; nm]; ns];
        let mut fail = vec![vec![0; nm]; ns];
        for (k, t) in trials.iter().enumerate() {
            let cell = k / trials_per_cell;
            let (si, mi) = (cell / nm, cell % nm);
            if !t.solver_converged {
                fail[si][mi] += 1;
                continue;
            }
            coef[si][mi] += t.coef_success as usize;
            sig[si][mi] += t.sig_success as usize;
        }
        PhaseGrid {
            m_values,
            s_values,
            success_counts_coef: coef,
            success_counts_sig: sig,
            solver_failures: fail,
            trials_per_cell,
            overlay: None,
            trials,
        }
    }

    pub fn total_trials(&self) -> usize {
        self.trials.len()
    }

    pub fn solver_failure_rate(&self) -> f64 {
        let fails: usize = self.solver_failures.iter().flatten().sum();
        fails as f64 / self.total_trials().max(1) as f64
    }

    /// Fraction of signal successes per `m` for row `si`.
    pub fn sig_fractions(&self, si: usize) -> Vec<f64> {
        let t = self.trials_per_cell as f64;
        self.success_counts_sig[si].iter().map(|&c| c as f64 / t).collect()
    }

    pub fn coef_fractions(&self, si: usize) -> Vec<f64> {
        let t = self.trials_per_cell as f64;
        self.success_counts_coef[si].iter().map(|&c| c as f64 / t).collect()
    }
}

fn check_grid(m_values: &[usize], trials: usize, n: usize) -> Result<()> {
    if m_values.is_empty() || trials == 0 {
        return Err(Error::Domain("need a nonempty m grid and trials >= 1".into()));
    }
    if let Some(&m) = m_values.iter().find(|&&m| m == 0 || m > n) {
        return Err(Error::Domain(format!("m = {m} outside 1..={n}")));
    }
    Ok(())
}

/// Noiseless recovery of a fixed `z_ref` for every `m` in the grid.
pub fn run_phase_fixed(
    dict: &Dictionary,
    z_ref: &CoefVector,
    m_values: &[usize],
    trials: usize,
    master_seed: u64,
    kind: EnsembleKind,
    settings: &SolverSettings,
) -> Result<PhaseGrid> {
    check_grid(m_values, trials, dict.n())?;
    let work: Vec<(usize, usize)> = m_values
        .iter()
        .flat_map(|&m| (0..trials).map(move |t| (m, t)))
        .collect();
    let results = work
        .par_iter()
        .map(|&(m, t)| {
            let seed = derive_seed(master_seed, &[TAG_TRIAL, 0, 0, m as u64, t as u64]);
            let seeds = TrialSeeds { ensemble: seed, noise: seed };
            run_trial(dict, z_ref, m, 0.0, kind, seeds, settings)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseGrid::from_trials(
        vec![z_ref.sparsity()],
        m_values.to_vec(),
        trials,
        results,
    ))
}

/// Random-support experiment over a sparsity grid.
#[derive(Debug, Clone)]
pub struct PhaseFullPlan {
    pub s_values: Vec<usize>,
    pub m_values: Vec<usize>,
    /// Independent coefficient vectors per `s`.
    pub signals: usize,
    /// Measurement draws per signal and `m`.
    pub repetitions: usize,
    /// Monte-Carlo samples for each `δ̂`; zero skips the overlay.
    pub width_samples: usize,
    pub kind: EnsembleKind,
}

struct PreparedSignal {
    z_l1: CoefVector,
    width: Option<WidthEstimate>,
}

fn prepare_signal(
    dict: &Dictionary,
    s: usize,
    j: usize,
    plan: &PhaseFullPlan,
    master_seed: u64,
    settings: &SolverSettings,
) -> Result<PreparedSignal> {
    let mut rng = rng_from(master_seed, &[TAG_SIGNAL, s as u64, j as u64]);
    let z0 = CoefVector::random_sparse(&mut rng, dict.d(), s)?;
    let x0 = dict.matrix() * z0.entries();
    let sol = solve_bp_eq(dict.matrix(), &x0, settings)?;
    if !sol.converged {
        log::warn!("minimal representer for s={s}, signal {j} did not converge");
    }
    let z_l1 = sol.z.thresholded(crate::cone::SIGN_RTOL);
    let width = if plan.width_samples >= 2 {
        let cone = descent_generators(dict, &z_l1)?;
        let seed = derive_seed(master_seed, &[TAG_WIDTH, s as u64, j as u64]);
        Some(estimate_statdim(&cone, plan.width_samples, seed)?)
    } else {
        None
    };
    Ok(PreparedSignal { z_l1, width })
}

pub fn run_phase_full(
    dict: &Dictionary,
    plan: &PhaseFullPlan,
    master_seed: u64,
    settings: &SolverSettings,
) -> Result<PhaseGrid> {
    check_grid(&plan.m_values, plan.signals * plan.repetitions, dict.n())?;
    if let Some(&s) = plan.s_values.iter().find(|&&s| s == 0 || s > dict.d()) {
        return Err(Error::Domain(format!("sparsity {s} outside 1..={}", dict.d())));
    }
    let prep_work: Vec<(usize, usize)> = plan
        .s_values
        .iter()
        .flat_map(|&s| (0..plan.signals).map(move |j| (s, j)))
        .collect();
    let prepared = prep_work
        .par_iter()
        .map(|&(s, j)| prepare_signal(dict, s, j, plan, master_seed, settings))
        .collect::<Result<Vec<_>>>()?;

    let per_cell = plan.signals * plan.repetitions;
    let mut work = Vec::with_capacity(plan.s_values.len() * plan.m_values.len() * per_cell);
    for (si, &s) in plan.s_values.iter().enumerate() {
        for &m in &plan.m_values {
            for j in 0..plan.signals {
                for r in 0..plan.repetitions {
                    work.push((si, s, m, j, r));
                }
            }
        }
    }
    let results = work
        .par_iter()
        .map(|&(si, s, m, j, r)| {
            let p = &prepared[si * plan.signals + j];
            let seed = derive_seed(master_seed, &[TAG_TRIAL, s as u64, j as u64, m as u64, r as u64]);
            let seeds = TrialSeeds { ensemble: seed, noise: seed };
            run_trial(dict, &p.z_l1, m, 0.0, plan.kind, seeds, settings)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grid = PhaseGrid::from_trials(plan.s_values.clone(), plan.m_values.clone(), per_cell, results);
    if plan.width_samples >= 2 {
        let overlay = plan
            .s_values
            .iter()
            .enumerate()
            .map(|(si, _)| {
                let ws: Vec<&WidthEstimate> = prepared[si * plan.signals..(si + 1) * plan.signals]
                    .iter()
                    .filter_map(|p| p.width.as_ref())
                    .collect();
                let k = ws.len() as f64;
                let mean = ws.iter().map(|w| w.statdim).sum::<f64>() / k;
                let se = ws.iter().map(|w| w.stderr * w.stderr).sum::<f64>().sqrt() / k;
                (mean, se)
            })
            .collect();
        grid.overlay = Some(overlay);
    }
    Ok(grid)
}

/// Pool-adjacent-violators fit of a non-decreasing sequence (equal weights).
pub fn isotonic_increasing(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().expect("len > 1");
            *last = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

/// Where the isotonic fit of `fractions` first reaches `level`, linearly
/// interpolated between grid points. `None` if it never does.
pub fn crossing_point(m_values: &[usize], fractions: &[f64], level: f64) -> Option<f64> {
    let fit = isotonic_increasing(fractions);
    let k = fit.iter().position(|&v| v >= level)?;
    if k == 0 {
        return Some(m_values[0] as f64);
    }
    let (m0, m1) = (m_values[k - 1] as f64, m_values[k] as f64);
    let (f0, f1) = (fit[k - 1], fit[k]);
    Some(m0 + (level - f0) / (f1 - f0) * (m1 - m0))
}

/// Mean errors over a grid of noise levels at a fixed `m`.
#[derive(Debug, Clone)]
pub struct NoiseSweep {
    pub eta_values: Vec<f64>,
    pub mean_coef_err: Vec<f64>,
    pub mean_sig_err: Vec<f64>,
    /// Signal-error bound per `η`, present when `m > m0`.
    pub bound_sig: Vec<Option<f64>>,
    pub m: usize,
    pub m0: f64,
    pub trials: usize,
    pub solver_failures: Vec<usize>,
    /// Trials whose signal error exceeds the bound by more than the
    /// success threshold (errors below it count as exact recovery).
    pub bound_violations: Vec<usize>,
    /// Indexed `[eta][trial]`.
    pub results: Vec<Vec<TrialResult>>,
}

impl NoiseSweep {
    pub fn solver_failure_rate(&self) -> f64 {
        let total = (self.trials * self.eta_values.len()).max(1);
        self.solver_failures.iter().sum::<usize>() as f64 / total as f64
    }
}

/// `⌈δ̂⌉ + 40`.
pub fn default_noise_measurements(statdim: f64) -> usize {
    statdim.max(0.0).ceil() as usize + 40
}

#[allow(clippy::too_many_arguments)]
pub fn run_noise_sweep(
    dict: &Dictionary,
    z_ref: &CoefVector,
    m: usize,
    eta_values: &[f64],
    trials: usize,
    master_seed: u64,
    kind: EnsembleKind,
    prediction: &SamplingPrediction,
    settings: &SolverSettings,
) -> Result<NoiseSweep> {
    check_grid(&[m], trials, dict.n())?;
    if eta_values.is_empty() || eta_values.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::Domain("noise levels must be a nonempty list of values >= 0".into()));
    }
    let work: Vec<(usize, usize)> = (0..eta_values.len())
        .flat_map(|e| (0..trials).map(move |t| (e, t)))
        .collect();
    let flat = work
        .par_iter()
        .map(|&(e, t)| {
            let seeds = TrialSeeds {
                ensemble: derive_seed(master_seed, &[TAG_TRIAL, m as u64, e as u64, t as u64]),
                noise: derive_seed(master_seed, &[TAG_NOISE, m as u64, e as u64, t as u64]),
            };
            run_trial(dict, z_ref, m, eta_values[e], kind, seeds, settings)
        })
        .collect::<Result<Vec<_>>>()?;

    let m0 = prediction.m0;
    let results: Vec<Vec<TrialResult>> = flat.chunks(trials).map(|c| c.to_vec()).collect();
    let mut sweep = NoiseSweep {
        eta_values: eta_values.to_vec(),
        mean_coef_err: Vec::new(),
        mean_sig_err: Vec::new(),
        bound_sig: Vec::new(),
        m,
        m0,
        trials,
        solver_failures: Vec::new(),
        bound_violations: Vec::new(),
        results: Vec::new(),
    };
    for (e, row) in results.iter().enumerate() {
        let ok: Vec<&TrialResult> = row.iter().filter(|t| t.coef_err.is_finite()).collect();
        let k = ok.len().max(1) as f64;
        sweep.mean_coef_err.push(ok.iter().map(|t| t.coef_err).sum::<f64>() / k);
        sweep.mean_sig_err.push(ok.iter().map(|t| t.sig_err).sum::<f64>() / k);
        sweep.solver_failures.push(row.iter().filter(|t| !t.solver_converged).count());
        let bound = if (m as f64) > m0 {
            Some(error_bound_signal(eta_values[e], m, m0)?)
        } else {
            None
        };
        let violations = match bound {
            Some(b) => row
                .iter()
                .filter(|t| !(t.sig_err <= b + SUCCESS_THRESHOLD))
                .count(),
            None => 0,
        };
        sweep.bound_sig.push(bound);
        sweep.bound_violations.push(violations);
    }
    sweep.results = results;
    Ok(sweep)
}

#[cfg(test)]
mod tests;
