//! Perturbation test for `Z_{ℓ¹} = {z}`.
//!
//! If the minimal-ℓ¹ set is a face `F` with more than one point, a generic
//! reweighting `wᵢ = 1 + ε·uᵢ` selects a vertex of `F`, and the antithetic
//! weights `1 − ε·uᵢ` select a different one. A unique representer survives
//! both once `ε` is below its stability margin, so we scan `ε` downwards.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{solve_bp_eq, solve_bp_eq_weighted, BpSolution, SolverSettings};
use crate::dict::{CoefVector, Dictionary};
use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::rng::rng_from;

/// Relative objective perturbations tried in order.
pub const PERTURBATION_SCALES: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Weighted BP with weights `1 + eps·direction`.
pub fn perturbed_bp(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    direction: &[f64],
    eps: f64,
    settings: &SolverSettings,
) -> Result<BpSolution> {
    if !(eps.abs() < 1.0) || direction.iter().any(|u| u.abs() > 1.0) {
        return Err(Error::Domain("perturbation must keep the weights positive".into()));
    }
    let weights: Vec<f64> = direction.iter().map(|u| 1.0 + eps * u).collect();
    solve_bp_eq_weighted(m, y, Some(&weights), settings)
}

/// Solutions for the weight perturbations `+eps·u` and `−eps·u`.
pub fn antithetic_pair(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    direction: &[f64],
    eps: f64,
    settings: &SolverSettings,
) -> Result<(BpSolution, BpSolution)> {
    let plus = perturbed_bp(m, y, direction, eps, settings)?;
    let minus = perturbed_bp(m, y, direction, -eps, settings)?;
    Ok((plus, minus))
}

pub(crate) fn random_direction(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Heuristic check that `z` is the only minimal-ℓ¹ representer of `Dz`.
pub fn is_unique_representer(
    dict: &Dictionary,
    z: &CoefVector,
    seed: u64,
    settings: &SolverSettings,
) -> Result<bool> {
    let d = dict.matrix();
    if z.len() != dict.d() {
        return Err(Error::Domain("coefficient length does not match dictionary".into()));
    }
    let x = d * z.entries();
    if x.norm() == 0.0 {
        return Err(Error::Domain("Dz = 0 has no meaningful representer".into()));
    }
    let support = z.support();
    let ds = d.select_columns(support.iter());
    let (_, rank) = lstsq(&ds, &x);
    if rank < support.len() {
        return Ok(false);
    }

    let l1 = z.l1_norm();
    let base = solve_bp_eq(d, &x, settings)?;
    if base.objective > l1 + settings.opt_tol * l1.max(1.0) {
        return Ok(false);
    }
    let tol = 10.0 * settings.feas_tol * z.entries().norm().max(1.0);
    let mut rng = rng_from(seed, &[0x756e_6971]);
    let direction = random_direction(&mut rng, dict.d());
    for &eps in &PERTURBATION_SCALES {
        let (plus, minus) = antithetic_pair(d, &x, &direction, eps, settings)?;
        let close = |s: &BpSolution| (s.z.entries() - z.entries()).norm() <= tol;
        if close(&plus) && close(&minus) {
            return Ok(true);
        }
    }
    Ok(false)
}
