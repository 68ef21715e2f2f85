//! Transformed descent cones `D·D∧(‖·‖₁; z)`, their lineality/range split
//! and the analytic width bounds.

mod bounds;

pub use bounds::{
    coherence_circumangle_bound, corollary_sampling_rate, polytope_width_bound,
    sampling_bound_condition, width_bound_gauge, width_bound_polyhedral,
};

use nalgebra::{DMatrix, DVector};

use crate::dict::{CoefVector, Dictionary, SignalVector};
use crate::error::{Error, Result};
use crate::linalg::orthonormalize_columns;
use crate::rng::rng_from;
use crate::solve::{
    antithetic_pair, circumcenter, solve_bp_eq, Circumcenter, ConeProjector, Projection,
    SolverSettings, PERTURBATION_SCALES,
};

/// Entries below this fraction of `‖z‖_∞` count as zero when taking signs.
pub const SIGN_RTOL: f64 = 1e-12;
/// Relative rank tolerance for the lineality basis.
pub const LINEALITY_RTOL: f64 = 1e-10;
/// Projected range generators shorter than this (relative) are dropped.
pub const RANGE_DROP_RTOL: f64 = 1e-10;
/// Number of antithetic perturbation pairs in [`maximal_representer`].
pub const REPRESENTER_PAIRS: usize = 5;

/// A finitely generated cone `cone(x_1, …, x_k)` in `Rⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    generators: DMatrix<f64>,
    normalized: bool,
}

impl PolyhedralCone {
    pub fn new(generators: DMatrix<f64>) -> Result<Self> {
        if generators.ncols() == 0 || generators.nrows() == 0 {
            return Err(Error::Domain("a cone needs at least one generator".into()));
        }
        for (j, col) in generators.column_iter().enumerate() {
            let norm = col.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Domain(format!("generator {j} is zero or non-finite")));
            }
        }
        let normalized = generators
            .column_iter()
            .all(|c| (c.norm() - 1.0).abs() <= 1e-12);
        Ok(PolyhedralCone {
            generators,
            normalized,
        })
    }

    /// Builds a cone from columns, dropping those shorter than
    /// `rtol · (largest column norm)`.
    pub fn from_columns_dropping_zeros(columns: &DMatrix<f64>, rtol: f64) -> Result<Self> {
        let scale = columns.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..columns.ncols())
            .filter(|&j| columns.column(j).norm() > rtol * scale)
            .collect();
        PolyhedralCone::new(columns.select_columns(keep.iter()))
    }

    /// The orthant, or any cone given by the columns of an identity-like matrix.
    pub fn nonneg_orthant(n: usize) -> Result<Self> {
        PolyhedralCone::new(DMatrix::identity(n, n))
    }

    /// `span(basis)` represented by `±` each column.
    pub fn subspace(basis: &DMatrix<f64>) -> Result<Self> {
        let (n, l) = basis.shape();
        let mut g = DMatrix::zeros(n, 2 * l);
        for j in 0..l {
            g.set_column(2 * j, &basis.column(j));
            g.set_column(2 * j + 1, &(-basis.column(j)));
        }
        PolyhedralCone::new(g)
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn count(&self) -> usize {
        self.generators.ncols()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn normalized(&self) -> PolyhedralCone {
        let mut g = self.generators.clone();
        for mut col in g.column_iter_mut() {
            let norm = col.norm();
            col /= norm;
        }
        PolyhedralCone {
            generators: g,
            normalized: true,
        }
    }

    pub fn projector(&self) -> Result<ConeProjector> {
        ConeProjector::new(self.generators.clone())
    }

    pub fn project(&self, g: &DVector<f64>) -> Result<Projection> {
        self.projector()?.project(g)
    }

    /// Membership up to a residual of `tol · max(1, ‖h‖)`.
    pub fn contains(&self, h: &DVector<f64>, tol: f64) -> Result<bool> {
        let proj = self.project(h)?;
        Ok(proj.residual.norm() <= tol * h.norm().max(1.0))
    }

    pub fn circumcenter(&self, cert_tol: f64) -> Result<Circumcenter> {
        circumcenter(&self.generators, cert_tol)
    }
}

/// `C = C_L ⊕ C_R` with `C_R` the projection of `C` onto `C_L^⊥`.
#[derive(Debug, Clone)]
pub struct ConeDecomposition {
    /// `n × ℓ` orthonormal basis of the lineality space.
    pub lineality_basis: DMatrix<f64>,
    /// Absent when every range generator projects to zero.
    pub range_cone: Option<PolyhedralCone>,
    pub circum_theta: Option<DVector<f64>>,
    pub circum_alpha: Option<f64>,
    /// `|supp z|` of the representer used for the split.
    pub support_size: usize,
}

impl ConeDecomposition {
    pub fn lineality_dim(&self) -> usize {
        self.lineality_basis.ncols()
    }

    pub fn range_generator_count(&self) -> usize {
        self.range_cone.as_ref().map_or(0, |c| c.count())
    }

    pub fn ambient_dim(&self) -> usize {
        self.lineality_basis.nrows()
    }

    pub fn cos_alpha(&self) -> Option<f64> {
        self.circum_alpha.map(f64::cos)
    }

    pub fn tan_sq_alpha(&self) -> Option<f64> {
        self.circum_alpha.map(|a| {
            let c = a.cos();
            (1.0 - c * c) / (c * c)
        })
    }

    pub fn csv_header() -> &'static str {
        "lineality_dim,range_generators,alpha,theta"
    }

    /// One CSV record; `theta` entries are joined with `;`.
    pub fn csv_row(&self) -> String {
        let alpha = self
            .circum_alpha
            .map(crate::dict::fmt_f64)
            .unwrap_or_default();
        let theta = self
            .circum_theta
            .as_ref()
            .map(|t| {
                t.iter()
                    .map(|v| crate::dict::fmt_f64(*v))
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        format!(
            "{},{},{},{}",
            self.lineality_dim(),
            self.range_generator_count(),
            alpha,
            theta
        )
    }
}

/// Sign vector of `z` with the relative zero threshold applied.
pub fn sign_pattern(z: &CoefVector) -> DVector<f64> {
    let zmax = z.entries().amax();
    z.entries().map(|v| {
        if v.abs() <= SIGN_RTOL * zmax {
            0.0
        } else {
            v.signum()
        }
    })
}

fn check_signal(dict: &Dictionary, z: &CoefVector) -> Result<(DVector<f64>, Vec<usize>)> {
    if z.len() != dict.d() {
        return Err(Error::Domain(format!(
            "coefficient length {} does not match d = {}",
            z.len(),
            dict.d()
        )));
    }
    let signs = sign_pattern(z);
    let support: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] != 0.0).collect();
    if support.is_empty() {
        return Err(Error::Domain("z = 0 has no descent cone of interest".into()));
    }
    Ok((signs, support))
}

/// Generators `{±s·d_i − D·sign(z) : i ∈ [d]}` of `D·D∧(‖·‖₁; z)`, zero
/// vectors dropped.
pub fn descent_generators(dict: &Dictionary, z: &CoefVector) -> Result<PolyhedralCone> {
    let (signs, support) = check_signal(dict, z)?;
    let d = dict.d();
    let s = support.len() as f64;
    let m = dict.matrix();
    let v = m * &signs;
    let mut cols = DMatrix::zeros(dict.n(), 2 * d);
    for i in 0..d {
        let atom = m.column(i);
        cols.set_column(2 * i, &(atom * s - &v));
        cols.set_column(2 * i + 1, &(-atom * s - &v));
    }
    PolyhedralCone::from_columns_dropping_zeros(&cols, RANGE_DROP_RTOL)
}

/// Splits the descent cone at a maximal-support representer `z`.
///
/// The circumcenter of the range is computed when `cert_tol` is given.
pub fn lineality_decompose(
    dict: &Dictionary,
    z: &CoefVector,
    cert_tol: Option<f64>,
) -> Result<ConeDecomposition> {
    let (signs, support) = check_signal(dict, z)?;
    let d = dict.d();
    let n = dict.n();
    let s_bar = support.len();
    if s_bar >= d {
        return Err(Error::Domain(format!(
            "support size {s_bar} leaves the range empty (d = {d})"
        )));
    }
    let m = dict.matrix();
    let v = m * &signs;
    if v.norm() == 0.0 && (m * z.entries()).norm() == 0.0 {
        return Err(Error::Domain("Dz = 0".into()));
    }
    let s = s_bar as f64;
    let mut lin = DMatrix::zeros(n, s_bar);
    for (k, &i) in support.iter().enumerate() {
        lin.set_column(k, &(m.column(i) * (s * signs[i]) - &v));
    }
    let (basis, used) = orthonormalize_columns(&lin, LINEALITY_RTOL);
    log::debug!(
        "lineality: {} of {} spanning vectors independent (used {:?})",
        basis.ncols(),
        s_bar,
        used
    );

    let mut on_support = vec![false; d];
    for &i in &support {
        on_support[i] = true;
    }
    let off: Vec<usize> = (0..d).filter(|&j| !on_support[j]).collect();
    let mut range = DMatrix::zeros(n, 2 * off.len());
    for (k, &j) in off.iter().enumerate() {
        for (t, sign) in [1.0, -1.0].into_iter().enumerate() {
            let g = m.column(j) * (sign * s) - &v;
            let coeff = basis.transpose() * &g;
            let proj = g - &basis * coeff;
            range.set_column(2 * k + t, &proj);
        }
    }
    let scale = range.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let range_cone = if scale > 0.0 {
        Some(PolyhedralCone::from_columns_dropping_zeros(&range, RANGE_DROP_RTOL)?)
    } else {
        None
    };
    let (theta, alpha) = match (&range_cone, cert_tol) {
        (Some(cone), Some(tol)) => {
            let c = cone.circumcenter(tol)?;
            (Some(c.theta), Some(c.alpha))
        }
        _ => (None, None),
    };
    Ok(ConeDecomposition {
        lineality_basis: basis,
        range_cone,
        circum_theta: theta,
        circum_alpha: alpha,
        support_size: s_bar,
    })
}

/// A point in the relative interior of `Z_{ℓ¹}` for `x0`, hence of maximal
/// support. Averages antithetic pairs of reweighted BP solutions; the weight
/// scale shrinks until the reweighted optima stay on the optimal face.
pub fn maximal_representer(
    dict: &Dictionary,
    x0: &SignalVector,
    seed: u64,
    settings: &SolverSettings,
) -> Result<CoefVector> {
    if x0.len() != dict.n() {
        return Err(Error::Domain("signal length does not match dictionary".into()));
    }
    if x0.norm() == 0.0 {
        return Err(Error::Domain("x0 = 0".into()));
    }
    let m = dict.matrix();
    let x = x0.entries();
    let base = solve_bp_eq(m, x, settings)?;
    let opt = base.objective;
    let limit = opt + settings.opt_tol * opt.max(1.0);
    let mut rng = rng_from(seed, &[0x6d61_7872]);
    let directions: Vec<Vec<f64>> = (0..REPRESENTER_PAIRS)
        .map(|_| crate::solve::random_direction(&mut rng, dict.d()))
        .collect();

    let mut worst_drift = f64::INFINITY;
    'scales: for &eps in &PERTURBATION_SCALES {
        let mut sum = DVector::<f64>::zeros(dict.d());
        let mut count = 0.0;
        for dir in &directions {
            let (plus, minus) = antithetic_pair(m, x, dir, eps, settings)?;
            for sol in [plus, minus] {
                if sol.objective > limit {
                    worst_drift = sol.objective - opt;
                    log::debug!("perturbation {eps:e} left the optimal face (drift {worst_drift:e})");
                    continue 'scales;
                }
                sum += sol.z.entries();
                count += 1.0;
            }
        }
        let avg = CoefVector::new(sum / count).thresholded(SIGN_RTOL);
        let feas = (m * avg.entries() - x).norm();
        if avg.l1_norm() > limit || feas > 10.0 * settings.feas_tol * x.norm().max(1.0) {
            worst_drift = avg.l1_norm() - opt;
            continue;
        }
        return Ok(avg);
    }
    Err(Error::Inconsistent {
        drift: worst_drift,
        tolerance: settings.opt_tol,
    })
}

#[cfg(test)]
mod tests;
