//! Lawson–Hanson nonnegative least squares and projection onto finitely
//! generated cones.
//!
//! The active-set iteration works on the Gram matrix `G = RᵀR`, which
//! [`ConeProjector`] caches so that Monte-Carlo loops over many right-hand
//! sides pay for it once. Passive-set systems are solved through an upper
//! Cholesky factor that is extended column by column and rebuilt on removals.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub coefficients: DVector<f64>,
    /// `g − Rc`.
    pub residual: DVector<f64>,
    /// Largest violation of the KKT conditions (relative to `kkt_tol`'s scale).
    pub kkt_violation: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub point: DVector<f64>,
    pub residual: DVector<f64>,
    pub coefficients: DVector<f64>,
}

/// Cached data for repeated NNLS solves against a fixed generator matrix.
#[derive(Debug, Clone)]
pub struct ConeProjector {
    r: DMatrix<f64>,
    gram: DMatrix<f64>,
    col_scale: f64,
}

/// Upper-triangular Cholesky factor of `G[P, P]`, stored densely.
///
/// With `q` present the factor is built by Gram–Schmidt on the columns of
/// `R` instead of from `G`. That costs `O(n·|P|)` per column but measures
/// distances to the passive span without squaring the condition number.
struct Factor {
    order: Vec<usize>,
    u: DMatrix<f64>,
    q: Option<DMatrix<f64>>,
}

impl Factor {
    fn new(cap: usize, orthogonal_rows: Option<usize>) -> Self {
        Factor {
            order: Vec::with_capacity(cap),
            u: DMatrix::zeros(cap, cap),
            q: orthogonal_rows.map(|n| DMatrix::zeros(n, cap)),
        }
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    fn push(&mut self, src: &ConeProjector, j: usize) -> bool {
        if self.q.is_some() {
            self.push_orthogonal(&src.r, j)
        } else {
            self.push_gram(&src.gram, j)
        }
    }

    fn push_orthogonal(&mut self, r: &DMatrix<f64>, j: usize) -> bool {
        let p = self.len();
        let q = self.q.as_mut().expect("orthogonal factor");
        let mut v = r.column(j).into_owned();
        let norm = v.norm();
        let mut col = DVector::<f64>::zeros(p);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            let qp = q.columns(0, p);
            let c = qp.transpose() * &v;
            v.gemv(-1.0, &qp, &c, 1.0);
            col += c;
        }
        let diag = v.norm();
        if !(diag > ORTHO_DEPENDENCE * norm) {
            return false;
        }
        for a in 0..p {
            self.u[(a, p)] = col[a];
        }
        self.u[(p, p)] = diag;
        q.set_column(p, &(v / diag));
        self.order.push(j);
        true
    }

    #[allow(clippy::needless_range_loop)]
    /// Appends column `j` from the Gram matrix; refuses it if numerically
    /// dependent.
    fn push_gram(&mut self, gram: &DMatrix<f64>, j: usize) -> bool {
        let p = self.len();
        let mut col = vec![0.0; p];
        for (a, &ia) in self.order.iter().enumerate() {
            let mut v = gram[(ia, j)];
            for b in 0..a {
                v -= self.u[(b, a)] * col[b];
            }
            col[a] = v / self.u[(a, a)];
        }
        let diag = gram[(j, j)] - col.iter().map(|v| v * v).sum::<f64>();
        if !(diag > 1e-11 * gram[(j, j)]) {
            return false;
        }
        for (a, v) in col.into_iter().enumerate() {
            self.u[(a, p)] = v;
        }
        self.u[(p, p)] = diag.sqrt();
        self.order.push(j);
        true
    }

    fn rebuild(&mut self, src: &ConeProjector, keep: Vec<usize>) -> Vec<usize> {
        self.order.clear();
        let mut dropped = Vec::new();
        for j in keep {
            if !self.push(src, j) {
                dropped.push(j);
            }
        }
        dropped
    }

    /// Solves `G[P,P] x = rhs[P]` with the current ordering.
    #[allow(clippy::needless_range_loop)]
    fn solve(&self, rhs: &DVector<f64>) -> Vec<f64> {
        let p = self.len();
        let mut y = vec![0.0; p];
        for a in 0..p {
            let mut v = rhs[self.order[a]];
            for b in 0..a {
                v -= self.u[(b, a)] * y[b];
            }
            y[a] = v / self.u[(a, a)];
        }
        for a in (0..p).rev() {
            let mut v = y[a];
            for b in a + 1..p {
                v -= self.u[(a, b)] * y[b];
            }
            y[a] = v / self.u[(a, a)];
        }
        y
    }
}

const REFINE_PASSES: usize = 4;
/// Relative distance below which a column counts as dependent on `P`.
const ORTHO_DEPENDENCE: f64 = 1e-12;

impl ConeProjector {
    pub fn new(r: DMatrix<f64>) -> Result<Self> {
        if r.ncols() == 0 || r.nrows() == 0 {
            return Err(Error::Domain("nnls needs at least one generator".into()));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("generator matrix has non-finite entries".into()));
        }
        let gram = r.transpose() * &r;
        let col_scale = (0..r.ncols())
            .map(|j| gram[(j, j)].sqrt())
            .fold(0.0, f64::max);
        Ok(ConeProjector { r, gram, col_scale })
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    fn kkt_tol(&self, g: &DVector<f64>) -> f64 {
        1e-11 * self.col_scale.max(1e-300) * g.norm().max(self.col_scale).max(1e-300)
    }

    /// Gram-based active set first; a run that stalls is repeated with the
    /// orthogonal factorization.
    pub fn solve(&self, g: &DVector<f64>) -> Result<NnlsSolution> {
        if g.len() != self.r.nrows() {
            return Err(Error::Domain(format!(
                "point has length {}, cone lives in R^{}",
                g.len(),
                self.r.nrows()
            )));
        }
        match self.solve_with(g, false) {
            Err(Error::NnlsNotConverged { kkt_violation, .. }) => {
                log::debug!("nnls stalled at {kkt_violation:e}; retrying with orthogonal factor");
                self.solve_with(g, true)
            }
            other => other,
        }
    }

    fn solve_with(&self, g: &DVector<f64>, orthogonal: bool) -> Result<NnlsSolution> {
        let k = self.r.ncols();
        let tol = self.kkt_tol(g);
        let b = self.r.transpose() * g;
        let mut c = DVector::<f64>::zeros(k);
        let mut passive = vec![false; k];
        let mut excluded = vec![false; k];
        let cap = k.min(self.r.nrows() + 1).max(1);
        let mut factor = Factor::new(cap, orthogonal.then_some(self.r.nrows()));
        let mut w = b.clone();
        let max_iter = 3 * k + 50;
        let mut iterations = 0;
        let mut refined = 0;

        loop {
            iterations += 1;
            if iterations > max_iter {
                let residual = g - &self.r * &c;
                let violation = self.violation(&c, &residual, &passive);
                return Err(Error::NnlsNotConverged {
                    coefficients: c.as_slice().to_vec(),
                    kkt_violation: violation,
                    iterations,
                });
            }
            let mut best = None;
            let mut best_w = tol;
            for j in 0..k {
                if !passive[j] && !excluded[j] && w[j] > best_w {
                    best_w = w[j];
                    best = Some(j);
                }
            }
            let Some(j) = best else {
                // Iterative refinement with the true residual, then re-check.
                if refined >= REFINE_PASSES {
                    break;
                }
                refined += 1;
                let residual = g - &self.r * &c;
                let wr = self.r.transpose() * &residual;
                if factor.len() > 0 {
                    let delta = factor.solve(&wr);
                    let mut trial = c.clone();
                    for (a, &ia) in factor.order.iter().enumerate() {
                        trial[ia] += delta[a];
                    }
                    if factor.order.iter().all(|&i| trial[i] > 0.0) {
                        c = trial;
                    }
                }
                let residual = g - &self.r * &c;
                w = self.r.transpose() * &residual;
                excluded.iter_mut().for_each(|e| *e = false);
                continue;
            };
            if factor.len() >= self.r.nrows() || !factor.push(self, j) {
                excluded[j] = true;
                continue;
            }
            passive[j] = true;

            // Inner loop: keep the passive solution strictly positive.
            loop {
                let s = factor.solve(&b);
                if s.iter().all(|v| *v > 0.0) {
                    for (a, &ia) in factor.order.iter().enumerate() {
                        c[ia] = s[a];
                    }
                    break;
                }
                let mut step = 1.0;
                for (a, &ia) in factor.order.iter().enumerate() {
                    if s[a] <= 0.0 {
                        let t = c[ia] / (c[ia] - s[a]);
                        if t < step {
                            step = t;
                        }
                    }
                }
                for (a, &ia) in factor.order.iter().enumerate() {
                    c[ia] += step * (s[a] - c[ia]);
                }
                let keep: Vec<usize> = factor
                    .order
                    .iter()
                    .copied()
                    .filter(|&i| c[i] > 1e-15 * (1.0 + c.amax()))
                    .collect();
                let removed: Vec<usize> = factor
                    .order
                    .iter()
                    .copied()
                    .filter(|i| !keep.contains(i))
                    .collect();
                for i in removed {
                    passive[i] = false;
                    c[i] = 0.0;
                    if i == j {
                        excluded[i] = true;
                    }
                }
                for i in factor.rebuild(self, keep) {
                    passive[i] = false;
                    c[i] = 0.0;
                }
                if factor.len() == 0 {
                    break;
                }
            }
            if !excluded[j] {
                excluded.iter_mut().for_each(|e| *e = false);
            }
            refined = 0;
            // w = Rᵀg − G c over the passive columns only
            w.copy_from(&b);
            for &i in &factor.order {
                let ci = c[i];
                w.axpy(-ci, &self.gram.column(i), 1.0);
            }
        }

        let residual = g - &self.r * &c;
        let violation = self.violation(&c, &residual, &passive);
        if violation > tol * 10.0 {
            return Err(Error::NnlsNotConverged {
                coefficients: c.as_slice().to_vec(),
                kkt_violation: violation,
                iterations,
            });
        }
        Ok(NnlsSolution {
            coefficients: c,
            residual,
            kkt_violation: violation,
            iterations,
        })
    }

    /// max over `i` of the dual-feasibility and complementarity violations.
    fn violation(&self, c: &DVector<f64>, residual: &DVector<f64>, _passive: &[bool]) -> f64 {
        let w = self.r.transpose() * residual;
        let mut v: f64 = 0.0;
        for i in 0..c.len() {
            v = v.max(w[i]).max((c[i] * w[i]).abs() / (1.0 + c[i].abs()));
            if c[i] < 0.0 {
                v = v.max(-c[i]);
            }
        }
        v
    }

    /// Like [`solve`](Self::solve), but a run that stalls short of the KKT
    /// tolerance returns its last nonnegative iterate. Callers must verify
    /// the result themselves.
    pub fn solve_best_effort(&self, g: &DVector<f64>) -> Result<NnlsSolution> {
        match self.solve(g) {
            Err(Error::NnlsNotConverged {
                coefficients,
                kkt_violation,
                iterations,
            }) => {
                log::debug!("nnls stalled at kkt violation {kkt_violation:e}, using last iterate");
                let c = DVector::from_vec(coefficients).map(|v| v.max(0.0));
                let residual = g - &self.r * &c;
                Ok(NnlsSolution {
                    coefficients: c,
                    residual,
                    kkt_violation,
                    iterations,
                })
            }
            other => other,
        }
    }

    pub fn project(&self, g: &DVector<f64>) -> Result<Projection> {
        let sol = self.solve(g)?;
        let point = g - &sol.residual;
        Ok(Projection {
            point,
            residual: sol.residual,
            coefficients: sol.coefficients,
        })
    }
}

/// `min_{c ≥ 0} ‖g − Rc‖₂`.
pub fn nnls(r: &DMatrix<f64>, g: &DVector<f64>) -> Result<NnlsSolution> {
    ConeProjector::new(r.clone())?.solve(g)
}

/// Euclidean projection of `g` onto `cone(columns of r)`.
pub fn project_cone(r: &DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(ConeProjector::new(r.clone())?.project(g)?.point)
}
