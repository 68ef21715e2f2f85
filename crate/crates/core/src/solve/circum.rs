//! Circumcenter of a pointed polyhedral cone,
//! `cos α = max_{‖θ‖ ≤ 1} min_i ⟨θ, x_i⟩` over unit generators `x_i`.
//!
//! The max-min problem is a least-distance program: `u* = argmin ‖u‖` subject
//! to `Xᵀu ≥ 1` gives `θ = u*/‖u*‖` and `cos α = 1/‖u*‖`. The LDP is solved
//! exactly through one NNLS in dimension `n + 1`. A projected subgradient
//! variant is kept for cross-checks.

use nalgebra::{DMatrix, DVector};

use super::nnls::ConeProjector;
use crate::error::{Error, Result};
use crate::rng::{rng_from, unit_vector};

#[derive(Debug, Clone)]
pub struct Circumcenter {
    pub theta: DVector<f64>,
    pub alpha: f64,
    pub cos_alpha: f64,
    /// Indices of generators attaining the minimum within the activity tolerance.
    pub active: Vec<usize>,
    /// Distance of `cos α · θ` from the convex hull of the active generators.
    pub certificate_gap: f64,
}

impl Circumcenter {
    pub fn tan_sq(&self) -> f64 {
        let c = self.cos_alpha;
        (1.0 - c * c) / (c * c)
    }
}

fn normalize_columns(gens: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut x = gens.clone();
    for mut col in x.column_iter_mut() {
        let norm = col.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cone generator with zero or non-finite norm".into()));
        }
        col /= norm;
    }
    Ok(x)
}

const ACT_TOL: f64 = 1e-9;

fn min_inner(x: &DMatrix<f64>, theta: &DVector<f64>) -> f64 {
    (x.transpose() * theta).min()
}

/// Whether `target` lies in the convex hull of the columns of `points`;
/// returns the Euclidean distance found by an affinely augmented NNLS.
pub fn in_convex_hull(points: &DMatrix<f64>, target: &DVector<f64>) -> Result<f64> {
    let (n, k) = points.shape();
    if target.len() != n {
        return Err(Error::Domain("dimension mismatch in hull test".into()));
    }
    let scale = points.column_iter().map(|c| c.norm()).fold(1.0, f64::max);
    let mut aug = DMatrix::zeros(n + 1, k);
    aug.view_mut((0, 0), (n, k)).copy_from(points);
    aug.row_mut(n).fill(scale);
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(target);
    rhs[n] = scale;
    // any nonnegative iterate bounds the distance from above
    let sol = ConeProjector::new(aug)?.solve_best_effort(&rhs)?;
    Ok(sol.residual.norm())
}

/// Exact circumcenter; generators are normalized first.
pub fn circumcenter(generators: &DMatrix<f64>, cert_tol: f64) -> Result<Circumcenter> {
    let x = normalize_columns(generators)?;
    let (n, k) = x.shape();
    // E c ≈ f with E = [X; 1ᵀ], f = e_{n+1}; residual r = Ec − f.
    let mut e = DMatrix::zeros(n + 1, k);
    e.view_mut((0, 0), (n, k)).copy_from(&x);
    e.row_mut(n).fill(1.0);
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    // an inexact LDP solution is still checked by the certificate below
    let sol = ConeProjector::new(e)?.solve_best_effort(&f)?;
    let r = -&sol.residual;
    if r.norm() < 1e-12 || !(r[n] < -1e-14) {
        return Err(Error::NotPointed { cos_alpha: 0.0 });
    }
    let u = r.rows(0, n) / (-r[n]);
    let mut theta = u.normalize();
    let mut cos_alpha = min_inner(&x, &theta);
    if !(cos_alpha > 1e-12) {
        return Err(Error::NotPointed { cos_alpha });
    }

    // Polish on the active set: the LDP optimum satisfies X_Aᵀu = 1 exactly.
    let active: Vec<usize> = (0..k)
        .filter(|&i| sol.coefficients[i] > 0.0)
        .collect();
    if !active.is_empty() {
        let xa = x.select_columns(active.iter());
        let ones = DVector::from_element(active.len(), 1.0);
        let (lam, _) = crate::linalg::lstsq(&(xa.transpose() * &xa), &ones);
        let up = &xa * &lam;
        if lam.iter().all(|v| *v >= 0.0) && up.norm() > 0.0 {
            let cand = up.normalize();
            let c = min_inner(&x, &cand);
            if c >= cos_alpha {
                theta = cand;
                cos_alpha = c;
            }
        }
    }

    let inner = x.transpose() * &theta;
    let active: Vec<usize> = (0..k)
        .filter(|&i| inner[i] <= cos_alpha + ACT_TOL)
        .collect();
    let xa = x.select_columns(active.iter());
    let gap = in_convex_hull(&xa, &(&theta * cos_alpha))?;
    if gap > cert_tol {
        return Err(Error::Certificate { gap });
    }
    Ok(Circumcenter {
        alpha: cos_alpha.min(1.0).acos(),
        theta,
        cos_alpha,
        active,
        certificate_gap: gap,
    })
}

#[derive(Debug, Clone)]
pub struct SubgradientSettings {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SubgradientSettings {
    fn default() -> Self {
        SubgradientSettings {
            restarts: 20,
            iterations: 4000,
            seed: 0,
        }
    }
}

/// Projected subgradient ascent on `θ ↦ min_i ⟨θ, x_i⟩` over the unit ball,
/// with a Polyak-type step against the best value seen so far. Accurate to a
/// few digits only; returns the best `(θ, cos α)` over all restarts.
pub fn circumcenter_subgradient(
    generators: &DMatrix<f64>,
    settings: &SubgradientSettings,
) -> Result<(DVector<f64>, f64)> {
    let x = normalize_columns(generators)?;
    let (n, k) = x.shape();
    let mut best_theta = DVector::zeros(n);
    let mut best = f64::NEG_INFINITY;
    for restart in 0..settings.restarts.max(1) {
        let mut rng = rng_from(settings.seed, &[restart as u64]);
        let mut theta = if restart == 0 {
            let mean = x.column_mean();
            if mean.norm() > 0.0 {
                mean.normalize()
            } else {
                unit_vector(&mut rng, n)
            }
        } else {
            unit_vector(&mut rng, n)
        };
        let mut local_best = min_inner(&x, &theta);
        for it in 1..=settings.iterations {
            let inner = x.transpose() * &theta;
            let (i, &val) = inner
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("k >= 1");
            if val > local_best {
                local_best = val;
            }
            let gamma = 0.5 / (it as f64).sqrt();
            let step = (local_best - val + gamma * (1.0 - local_best).max(1e-3)).max(0.0);
            theta.axpy(step, &x.column(i), 1.0);
            let norm = theta.norm();
            if norm > 1.0 {
                theta /= norm;
            }
            if k == 1 {
                break;
            }
        }
        let val = min_inner(&x, &theta);
        if val > best {
            best = val;
            best_theta = theta;
        }
    }
    // report on the unit sphere: rescaling only increases a positive minimum
    if best > 0.0 {
        best_theta = best_theta.normalize();
        best = min_inner(&x, &best_theta);
    }
    Ok((best_theta, best))
}
