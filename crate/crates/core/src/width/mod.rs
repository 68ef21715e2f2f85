//! Statistical-dimension estimates and the sampling-rate and error
//! predictions built on them.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::cone::{ConeDecomposition, PolyhedralCone};
use crate::dict::{fmt_f64, CoefVector, Dictionary};
use crate::error::{Error, Result};
use crate::rng::{gaussian_vector, rng_from, unit_vector};
use crate::solve::{solve_bp_ineq, ConeProjector, SolverSettings};

pub const DEFAULT_SAMPLES: usize = 300;
/// Perturbation size for the λ_min heuristic, relative to `‖Dz‖₂`.
pub const LAMBDA_PERTURBATION: f64 = 1e-3;
pub const DEFAULT_LAMBDA_PERTURBATIONS: usize = 20;

/// Monte-Carlo estimate of `δ(C) = E‖Π_C(g)‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthEstimate {
    pub statdim: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl WidthEstimate {
    pub fn csv_header() -> &'static str {
        "cone_label,statdim,stderr,samples,seed"
    }

    pub fn csv_row(&self, label: &str) -> String {
        format!(
            "{},{},{},{},{}",
            label,
            fmt_f64(self.statdim),
            fmt_f64(self.stderr),
            self.samples,
            self.seed
        )
    }
}

fn summarize(values: &[f64], seed: u64) -> WidthEstimate {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    WidthEstimate {
        statdim: mean,
        stderr: (var / k).sqrt(),
        samples: values.len(),
        seed,
    }
}

/// Squared projection norms for samples `0..samples`; sample `i` draws from
/// its own counter-derived stream, so the result does not depend on how the
/// work is scheduled.
fn projected_norms(
    projector: &ConeProjector,
    samples: usize,
    seed: u64,
    subspace: Option<&nalgebra::DMatrix<f64>>,
) -> Result<Vec<f64>> {
    let n = projector.dim();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(seed, &[i as u64]);
            let mut g = gaussian_vector(&mut rng, n);
            if let Some(basis) = subspace {
                let c = basis.transpose() * &g;
                g -= basis * c;
            }
            projector
                .project(&g)
                .map(|p| p.point.norm_squared())
                .map_err(|e| Error::Sample {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

pub fn estimate_statdim(cone: &PolyhedralCone, samples: usize, seed: u64) -> Result<WidthEstimate> {
    check_samples(samples)?;
    let projector = cone.projector()?;
    let values = projected_norms(&projector, samples, seed, None)?;
    Ok(summarize(&values, seed))
}

/// `dim C_L` plus a Monte-Carlo estimate of `δ(C_R)` inside `C_L^⊥`.
pub fn estimate_statdim_decomposed(
    dec: &ConeDecomposition,
    samples: usize,
    seed: u64,
) -> Result<WidthEstimate> {
    check_samples(samples)?;
    let l = dec.lineality_dim() as f64;
    let Some(range) = &dec.range_cone else {
        return Ok(WidthEstimate {
            statdim: l,
            stderr: 0.0,
            samples,
            seed,
        });
    };
    let projector = range.projector()?;
    let basis = (dec.lineality_dim() > 0).then_some(&dec.lineality_basis);
    let values = projected_norms(&projector, samples, seed, basis)?;
    let mut est = summarize(&values, seed);
    est.statdim += l;
    Ok(est)
}

/// `2s log(d/s) + 2s`.
pub fn sparse_descent_width_bound(s: usize, d: usize) -> Result<f64> {
    if s == 0 || s > d {
        return Err(Error::Domain(format!("need 1 <= s <= d, got s = {s}, d = {d}")));
    }
    let s_f = s as f64;
    Ok(2.0 * s_f * (d as f64 / s_f).ln() + 2.0 * s_f)
}

/// Constants `c` and `γ` of the sub-Gaussian measurement model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConstants {
    pub c_const: f64,
    pub gamma: f64,
}

impl EnsembleConstants {
    pub const GAUSSIAN: EnsembleConstants = EnsembleConstants {
        c_const: 1.0,
        gamma: 1.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPrediction {
    pub m0: f64,
    pub width_sq: f64,
    pub u: f64,
    pub c_const: f64,
    pub gamma: f64,
}

/// `m0 = c²γ⁴(√w² + u)² + 1`.
pub fn predict_m0(width_sq: f64, u: f64, constants: EnsembleConstants) -> Result<SamplingPrediction> {
    if !(u >= 0.0) || !(width_sq >= 0.0) {
        return Err(Error::Domain(format!("need u >= 0 and width_sq >= 0 (u = {u}, w2 = {width_sq})")));
    }
    let EnsembleConstants { c_const, gamma } = constants;
    let root = width_sq.sqrt() + u;
    Ok(SamplingPrediction {
        m0: c_const * c_const * gamma.powi(4) * root * root + 1.0,
        width_sq,
        u,
        c_const,
        gamma,
    })
}

/// [`predict_m0`] with `δ̂` standing in for the squared conic width. Since
/// `w² ≤ δ`, this errs on the conservative side.
pub fn predict_m0_from_estimate(
    est: &WidthEstimate,
    u: f64,
    constants: EnsembleConstants,
) -> Result<SamplingPrediction> {
    predict_m0(est.statdim.max(0.0), u, constants)
}

/// `2η/(√(m−1) − √(m₀−1))`.
pub fn error_bound_signal(eta: f64, m: usize, m0: f64) -> Result<f64> {
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
    }
    if !(m0 >= 1.0) || (m as f64) <= m0 {
        return Err(Error::Domain(format!("bound vacuous: m = {m}, m0 = {m0}")));
    }
    Ok(2.0 * eta / (((m - 1) as f64).sqrt() - (m0 - 1.0).sqrt()))
}

pub fn error_bound_coef(eta: f64, m: usize, m0: f64, lambda_min: f64) -> Result<f64> {
    if !(lambda_min > 0.0) {
        return Err(Error::Domain(format!("lambda_min must be > 0, got {lambda_min}")));
    }
    Ok(error_bound_signal(eta, m, m0)? / lambda_min)
}

/// Upper bound on `λ_min(D; D∧(‖·‖₁, z))` from perturbed noisy solves:
/// every `ŵ` of `min ‖w‖₁ s.t. ‖Dz + ê − Dw‖ ≤ ‖ê‖` gives `2‖ê‖/‖z − ŵ‖`.
/// Returns `+∞` when no perturbation moves the solution measurably.
pub fn upper_bound_lambda_min(
    dict: &Dictionary,
    z: &CoefVector,
    perturbations: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<f64> {
    let m = dict.matrix();
    let x = m * z.entries();
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::Domain("Dz = 0".into()));
    }
    let eta = LAMBDA_PERTURBATION * norm;
    let floor = 10.0 * settings.feas_tol;
    let mut best = f64::INFINITY;
    let mut failures = 0;
    let mut last_err = None;
    for p in 0..perturbations {
        let mut rng = rng_from(seed, &[0x6c61_6d62, p as u64]);
        let e: DVector<f64> = unit_vector(&mut rng, dict.n()) * eta;
        match solve_bp_ineq(m, &(&x + e), eta, settings) {
            Ok(sol) if sol.converged => {
                let gap = (z.entries() - sol.z.entries()).norm();
                if gap >= floor {
                    best = best.min(2.0 * eta / gap);
                }
            }
            Ok(_) => {
                log::warn!("lambda_min perturbation {p}: solver did not converge");
                failures += 1;
            }
            Err(e) => {
                log::warn!("lambda_min perturbation {p}: {e}");
                failures += 1;
                last_err = Some(e);
            }
        }
    }
    if failures == perturbations {
        return Err(last_err.unwrap_or_else(|| {
            Error::Numerical("every lambda_min perturbation failed to converge".into())
        }));
    }
    Ok(best)
}
