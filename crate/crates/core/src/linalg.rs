//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative cut-off below which singular values are treated as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Singular values below this fraction of the largest one are dropped from a
/// [`RowSpace`]. Small enough to keep badly conditioned products such as the
/// super-resolution dictionaries consistent with their own measurements.
pub const ROW_RTOL: f64 = 1e-12;

/// Thin SVD `M = U Σ Vᵀ` restricted to the numerically nonzero singular values.
#[derive(Debug, Clone)]
pub struct RowSpace {
    /// m × r left singular vectors.
    pub u: DMatrix<f64>,
    /// r squared singular values, descending.
    pub sq_singular: Vec<f64>,
    /// d × r right singular vectors.
    pub v: DMatrix<f64>,
}

impl RowSpace {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return RowSpace {
                u: DMatrix::zeros(rows, 0),
                sq_singular: Vec::new(),
                v: DMatrix::zeros(cols, 0),
            };
        }
        // SVD of M itself: going through M Mᵀ would square the condition number
        let svd = m.clone().svd(true, true);
        let (su, svt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
        let top = order.first().map(|&i| sv[i]).unwrap_or(0.0);
        let cut = top * ROW_RTOL;
        let keep: Vec<usize> = order.into_iter().filter(|&i| sv[i] > cut && sv[i] > 0.0).collect();
        let r = keep.len();
        let mut u = DMatrix::zeros(rows, r);
        let mut v = DMatrix::zeros(cols, r);
        let mut sq = Vec::with_capacity(r);
        for (k, &i) in keep.iter().enumerate() {
            u.set_column(k, &su.column(i));
            v.set_column(k, &svt.row(i).transpose());
            sq.push(sv[i] * sv[i]);
        }
        RowSpace { u, sq_singular: sq, v }
    }

    pub fn rank(&self) -> usize {
        self.sq_singular.len()
    }

    /// Minimum-norm solution of `M x = y` (least squares when inconsistent).
    pub fn min_norm_solution(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut coef = self.u.transpose() * y;
        for (k, &l) in self.sq_singular.iter().enumerate() {
            coef[k] /= l.sqrt();
        }
        &self.v * coef
    }

    /// Component of `y` outside the column space of `M`.
    pub fn range_residual(&self, y: &DVector<f64>) -> f64 {
        let proj = &self.u * (self.u.transpose() * y);
        (y - proj).norm()
    }

    /// Least-squares solution of `Mᵀ λ = g`.
    pub fn transpose_lstsq(&self, g: &DVector<f64>) -> DVector<f64> {
        let mut coef = self.v.transpose() * g;
        for (k, &l) in self.sq_singular.iter().enumerate() {
            coef[k] /= l.sqrt();
        }
        &self.u * coef
    }

    pub fn spectral_norm(&self) -> f64 {
        self.sq_singular.first().map(|l| l.sqrt()).unwrap_or(0.0)
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization sweep.
///
/// Columns whose residual norm falls below `rtol` times the largest input
/// column norm are dropped. Returns the basis and the indices of the input
/// columns that contributed a new direction.
pub fn orthonormalize_columns(vectors: &DMatrix<f64>, rtol: f64) -> (DMatrix<f64>, Vec<usize>) {
    let n = vectors.nrows();
    let scale = (0..vectors.ncols())
        .map(|j| vectors.column(j).norm())
        .fold(0.0, f64::max);
    let tol = rtol * scale.max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut used = Vec::new();
    for j in 0..vectors.ncols() {
        let mut w = vectors.column(j).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
            used.push(j);
        } else {
            log::debug!("orthonormalize: column {j} dependent (residual {norm:.3e} <= {tol:.3e})");
        }
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (k, q) in basis.iter().enumerate() {
        out.set_column(k, q);
    }
    (out, used)
}

/// Minimum-norm least-squares solve through an SVD with relative rank cut-off.
/// Returns the solution and the numerical rank of `a`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, usize) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), 0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = smax * RANK_RTOL * (a.nrows().max(a.ncols()) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let x = svd
        .solve(b, cut)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    (x, rank)
}

pub fn l1_norm(x: &DVector<f64>) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn max_abs(x: &DVector<f64>) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}

/// Support of `x` after zeroing entries below `rtol · ‖x‖∞`.
pub fn support(x: &DVector<f64>, rtol: f64) -> Vec<usize> {
    let cut = rtol * max_abs(x);
    (0..x.len()).filter(|&i| x[i] != 0.0 && x[i].abs() > cut).collect()
}
