//! ADMM for `min ‖z‖₁ s.t. Mz = y` and `min ‖z‖₁ s.t. ‖Mz − y‖₂ ≤ η`.
//!
//! Both solvers alternate a linear step (affine projection, resp. a ridge
//! solve against `I + MᵀM`) with soft-thresholding. Whenever the support of
//! the sparse iterate settles, it is refined on that support and checked
//! against a dual certificate; a certified point is returned immediately.

use nalgebra::{DMatrix, DVector};

use super::{BpSolution, SolverSettings};
use crate::dict::CoefVector;
use crate::error::{Error, Result};
use crate::linalg::{l1_norm, RowSpace};

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn nonzero_pattern(z: &DVector<f64>) -> Vec<usize> {
    (0..z.len()).filter(|&i| z[i] != 0.0).collect()
}

/// When to try refining on the current support.
struct PolishSchedule {
    last_support: Vec<usize>,
    stable_for: usize,
    next_attempt: usize,
    backoff: usize,
    failed_support: Option<Vec<usize>>,
}

impl PolishSchedule {
    fn new() -> Self {
        PolishSchedule {
            last_support: Vec::new(),
            stable_for: 0,
            next_attempt: 10,
            backoff: 10,
            failed_support: None,
        }
    }

    fn observe(&mut self, iter: usize, support: Vec<usize>) -> Option<Vec<usize>> {
        if support == self.last_support {
            self.stable_for += 1;
        } else {
            self.stable_for = 0;
            self.last_support = support;
        }
        if self.stable_for < 3 || iter < self.next_attempt || self.last_support.is_empty() {
            return None;
        }
        Some(self.last_support.clone())
    }

    fn failed(&mut self, iter: usize, support: Vec<usize>) {
        if self.failed_support.as_ref() == Some(&support) {
            self.backoff = (self.backoff * 2).min(400);
        } else {
            self.backoff = 10;
        }
        self.failed_support = Some(support);
        self.next_attempt = iter + self.backoff;
    }
}

struct Polished {
    z: DVector<f64>,
    certified: bool,
    primal: f64,
    violation: f64,
}

fn signs_match(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x != 0.0 && x.signum() == y.signum())
}

fn scatter(d: usize, support: &[usize], values: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(d);
    for (k, &i) in support.iter().enumerate() {
        out[i] = values[k];
    }
    out
}

const AUGMENT_CANDIDATES: usize = 32;
const STALLED_BACKOFF: usize = 160;
const RHO_UPDATE_EVERY: usize = 50;
const RHO_BALANCE: f64 = 10.0;
const RHO_FACTOR: f64 = 2.0;
const RHO_MAX: f64 = 1e6;
const RHO_MIN: f64 = 1e-6;

struct EqProblem<'a> {
    m: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    weights: Vec<f64>,
    rows: RowSpace,
    settings: &'a SolverSettings,
}

impl EqProblem<'_> {
    fn feas_limit(&self) -> f64 {
        self.settings.feas_tol * self.y.norm().max(1.0)
    }

    fn objective(&self, z: &DVector<f64>) -> f64 {
        z.iter().zip(&self.weights).map(|(v, w)| w * v.abs()).sum()
    }

    /// Minimal feasibility correction on `support`, then a dual certificate
    /// built from the ADMM multiplier estimate `dual ≈ Mᵀλ`.
    fn polish(
        &self,
        z: &DVector<f64>,
        support: &[usize],
        dual: &DVector<f64>,
        augment: bool,
    ) -> Option<Polished> {
        let signs: Vec<f64> = support.iter().map(|&i| z[i].signum()).collect();
        let first = self.polish_on(z, support, &signs, dual);
        if !augment || matches!(first, Some(ref p) if p.certified) {
            return first;
        }
        // On near-degenerate problems ADMM can stall with an atom missing from
        // the support; try adding the atoms the multiplier ranks highest.
        let lam0 = self.rows.transpose_lstsq(dual);
        let full = self.m.transpose() * &lam0;
        let mut extra: Vec<(usize, f64)> = (0..self.weights.len())
            .filter(|i| z[*i] == 0.0)
            .map(|i| (i, full[i].abs() / self.weights[i]))
            .collect();
        let room = self.rows.rank().saturating_sub(support.len());
        if extra.is_empty() || room == 0 {
            return first;
        }
        extra.sort_by(|a, b| b.1.total_cmp(&a.1));
        extra.truncate(AUGMENT_CANDIDATES);
        let base: Vec<(usize, f64)> = support.iter().copied().zip(signs).collect();
        let mut trials: Vec<Vec<(usize, f64)>> = extra.iter().map(|&e| vec![e]).collect();
        if room > 1 && extra.len() > 1 {
            trials.push(extra.iter().take(room).copied().collect());
        }
        let mut fallback = first;
        for add in trials {
            let mut augmented = base.clone();
            augmented.extend(add.iter().map(|&(i, _)| (i, full[i].signum())));
            augmented.sort_by_key(|p| p.0);
            let (idx, sg): (Vec<usize>, Vec<f64>) = augmented.into_iter().unzip();
            match self.polish_on(z, &idx, &sg, dual) {
                Some(p) if p.certified => return Some(p),
                Some(p) if fallback.is_none() => fallback = Some(p),
                _ => {}
            }
        }
        fallback
    }

    fn polish_on(
        &self,
        z: &DVector<f64>,
        support: &[usize],
        signs: &[f64],
        dual: &DVector<f64>,
    ) -> Option<Polished> {
        let ms = self.m.select_columns(support.iter());
        let zs = DVector::from_iterator(support.len(), support.iter().map(|&i| z[i]));
        let resid = &ms * &zs - self.y;
        let svd = ms.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cut = smax * 1e-10 * (ms.nrows().max(ms.ncols()) as f64);
        let corr = svd.solve(&resid, cut).ok()?;
        let polished = &zs - corr;
        let primal = (&ms * &polished - self.y).norm();
        if primal > self.feas_limit() || !signs_match(polished.as_slice(), signs) {
            return None;
        }
        let target = DVector::from_iterator(
            support.len(),
            support.iter().enumerate().map(|(k, &i)| self.weights[i] * polished[k].signum()),
        );
        let lam0 = self.rows.transpose_lstsq(dual);
        let rhs = &target - ms.transpose() * &lam0;
        // min-norm δ with M_Sᵀ δ = rhs, via the SVD of M_S
        let ut_rhs = svd.v_t.as_ref()?.clone() * &rhs;
        let mut coef = ut_rhs;
        for (k, s) in svd.singular_values.iter().enumerate() {
            coef[k] = if *s > cut { coef[k] / s } else { 0.0 };
        }
        let lam = lam0 + svd.u.as_ref()? * coef;
        let full = self.m.transpose() * &lam;
        let mut violation: f64 = 0.0;
        let mut on_support = vec![false; self.weights.len()];
        for (k, &i) in support.iter().enumerate() {
            on_support[i] = true;
            violation = violation.max((full[i] - target[k]).abs() / self.weights[i]);
        }
        for (j, &w) in self.weights.iter().enumerate() {
            if !on_support[j] {
                violation = violation.max(full[j].abs() / w - 1.0);
            }
        }
        Some(Polished {
            z: scatter(self.weights.len(), support, &polished),
            certified: violation <= self.settings.cert_tol,
            primal,
            violation: violation.max(0.0),
        })
    }
}

/// `min ‖z‖₁ s.t. Mz = y`.
pub fn solve_bp_eq(m: &DMatrix<f64>, y: &DVector<f64>, settings: &SolverSettings) -> Result<BpSolution> {
    solve_bp_eq_weighted(m, y, None, settings)
}

/// `min Σ wᵢ|zᵢ| s.t. Mz = y` with strictly positive weights.
pub fn solve_bp_eq_weighted(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    weights: Option<&[f64]>,
    settings: &SolverSettings,
) -> Result<BpSolution> {
    settings.validate()?;
    let d = m.ncols();
    if y.len() != m.nrows() {
        return Err(Error::Domain(format!(
            "measurement length {} does not match {} rows",
            y.len(),
            m.nrows()
        )));
    }
    let weights = match weights {
        Some(w) if w.len() != d => return Err(Error::Domain("weight length mismatch".into())),
        Some(w) if w.iter().any(|v| !(*v > 0.0)) => {
            return Err(Error::Domain("weights must be positive".into()))
        }
        Some(w) => w.to_vec(),
        None => vec![1.0; d],
    };
    let rows = RowSpace::new(m);
    let problem = EqProblem {
        m,
        y,
        weights,
        rows,
        settings,
    };
    let infeas = problem.rows.range_residual(y);
    if infeas > problem.feas_limit() {
        return Err(Error::Infeasible {
            residual: infeas,
            tolerance: problem.feas_limit(),
        });
    }
    if y.norm() == 0.0 {
        return Ok(BpSolution {
            z: CoefVector::zeros(d),
            objective: 0.0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            converged: true,
            certified: true,
            iterations: 0,
        });
    }

    let mut rho = settings.penalty;
    let alpha = settings.over_relaxation;
    let v = &problem.rows.v;
    let x_part = problem.rows.min_norm_solution(y);
    let mut thresholds: Vec<f64> = problem.weights.iter().map(|w| w / rho).collect();
    let sqrt_d = (d as f64).sqrt();

    let mut x = DVector::zeros(d);
    let mut z = DVector::<f64>::zeros(d);
    let mut u = DVector::<f64>::zeros(d);
    let mut z_old = DVector::<f64>::zeros(d);
    let mut schedule = PolishSchedule::new();
    let mut best_uncertified: Option<Polished> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut dual_res = f64::INFINITY;

    for iter in 1..=settings.max_iters {
        iterations = iter;
        // x = Π_{Mx=y}(z − u)
        let w = &z - &u;
        let coeff = v.transpose() * &w;
        x.copy_from(&w);
        x.gemv(-1.0, v, &coeff, 1.0);
        x += &x_part;

        z_old.copy_from(&z);
        for i in 0..d {
            let xh = alpha * x[i] + (1.0 - alpha) * z_old[i];
            let zi = soft_threshold(xh + u[i], thresholds[i]);
            u[i] += xh - zi;
            z[i] = zi;
        }

        let r_norm = (&x - &z).norm();
        dual_res = rho * (&z - &z_old).norm();
        let eps_pri = sqrt_d * settings.abs_tol + settings.rel_tol * x.norm().max(z.norm());
        let eps_dual = sqrt_d * settings.abs_tol + settings.rel_tol * rho * u.norm();

        if settings.polish {
            if let Some(support) = schedule.observe(iter, nonzero_pattern(&z)) {
                let stalled = schedule.backoff >= STALLED_BACKOFF;
                match problem.polish(&z, &support, &(&u * rho), stalled) {
                    Some(p) if p.certified => {
                        return Ok(finish_eq(&problem, p, true, iter));
                    }
                    Some(p) => {
                        best_uncertified = Some(p);
                        schedule.failed(iter, support);
                    }
                    None => schedule.failed(iter, support),
                }
            }
        }
        if r_norm <= eps_pri && dual_res <= eps_dual {
            converged = true;
            break;
        }
        // residual balancing; u is scaled so it shrinks as ρ grows
        if iter % RHO_UPDATE_EVERY == 0 {
            let scale = if r_norm > RHO_BALANCE * dual_res {
                RHO_FACTOR
            } else if dual_res > RHO_BALANCE * r_norm {
                1.0 / RHO_FACTOR
            } else {
                1.0
            };
            if scale != 1.0 && (rho * scale) <= RHO_MAX && (rho * scale) >= RHO_MIN {
                rho *= scale;
                u /= scale;
                for (t, w) in thresholds.iter_mut().zip(&problem.weights) {
                    *t = w / rho;
                }
            }
        }
    }

    if settings.polish {
        let support = nonzero_pattern(&z);
        if !support.is_empty() {
            if let Some(p) = problem.polish(&z, &support, &(&u * rho), true) {
                if p.certified {
                    return Ok(finish_eq(&problem, p, true, iterations));
                }
                best_uncertified = Some(p);
            }
        }
        if let Some(p) = best_uncertified {
            let limit = problem.objective(&z) + settings.opt_tol * problem.objective(&z).max(1.0);
            if converged && problem.objective(&p.z) <= limit {
                return Ok(finish_eq(&problem, p, false, iterations));
            }
        }
    }
    let primal = (m * &z - y).norm();
    Ok(BpSolution {
        objective: l1_norm(&z),
        z: CoefVector::new(z),
        primal_residual: primal,
        dual_residual: dual_res,
        converged,
        certified: false,
        iterations,
    })
}

fn finish_eq(problem: &EqProblem<'_>, p: Polished, certified: bool, iterations: usize) -> BpSolution {
    let _ = problem;
    BpSolution {
        objective: l1_norm(&p.z),
        z: CoefVector::new(p.z),
        primal_residual: p.primal,
        dual_residual: p.violation,
        converged: true,
        certified,
        iterations,
    }
}

/// `min ‖z‖₁ s.t. ‖Mz − y‖₂ ≤ η`; `η = 0` delegates to [`solve_bp_eq`].
pub fn solve_bp_ineq(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    eta: f64,
    settings: &SolverSettings,
) -> Result<BpSolution> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return solve_bp_eq(m, y, settings);
    }
    settings.validate()?;
    let (rows_m, d) = m.shape();
    if y.len() != rows_m {
        return Err(Error::Domain("measurement length does not match rows".into()));
    }
    if y.norm() <= eta {
        return Ok(BpSolution {
            z: CoefVector::zeros(d),
            objective: 0.0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            converged: true,
            certified: true,
            iterations: 0,
        });
    }

    // Rescale the data block to unit spectral norm; the problem is invariant.
    let rows0 = RowSpace::new(m);
    let scale = rows0.spectral_norm().max(f64::MIN_POSITIVE);
    let ms = m / scale;
    let ys = y / scale;
    let eta_s = eta / scale;
    let rows = RowSpace::new(&ms);
    let shrink: Vec<f64> = rows.sq_singular.iter().map(|l| l / (1.0 + l)).collect();

    let mut rho = settings.penalty;
    let alpha = settings.over_relaxation;
    let mut thr = 1.0 / rho;
    let sqrt_dm = ((d + rows_m) as f64).sqrt();

    let mut z = DVector::<f64>::zeros(d);
    let mut w = DVector::<f64>::zeros(rows_m);
    let mut uz = DVector::<f64>::zeros(d);
    let mut uw = DVector::<f64>::zeros(rows_m);
    let mut schedule = PolishSchedule::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut dual_res = f64::INFINITY;
    let mut x = DVector::zeros(d);

    for iter in 1..=settings.max_iters {
        iterations = iter;
        // (I + MᵀM) x = (z − u_z) + Mᵀ(y + w − u_w)
        let rhs = (&z - &uz) + ms.transpose() * (&ys + &w - &uw);
        let mut coeff = rows.v.transpose() * &rhs;
        for (k, s) in shrink.iter().enumerate() {
            coeff[k] *= s;
        }
        x.copy_from(&rhs);
        x.gemv(-1.0, &rows.v, &coeff, 1.0);
        let mx = &ms * &x - &ys;

        let z_old = z.clone();
        let w_old = w.clone();
        for i in 0..d {
            let xh = alpha * x[i] + (1.0 - alpha) * z_old[i];
            let zi = soft_threshold(xh + uz[i], thr);
            uz[i] += xh - zi;
            z[i] = zi;
        }
        let wh = &mx * alpha + &w_old * (1.0 - alpha);
        let mut cand = &wh + &uw;
        let cn = cand.norm();
        if cn > eta_s {
            cand *= eta_s / cn;
        }
        uw += &wh - &cand;
        w = cand;

        let r_norm = ((&x - &z).norm_squared() + (&mx - &w).norm_squared()).sqrt();
        dual_res = rho * ((&z - &z_old) + ms.transpose() * (&w - &w_old)).norm();
        let eps_pri = sqrt_dm * settings.abs_tol
            + settings.rel_tol * (x.norm_squared() + mx.norm_squared()).sqrt().max(
                (z.norm_squared() + w.norm_squared()).sqrt().max(ys.norm()),
            );
        let eps_dual = sqrt_dm * settings.abs_tol
            + settings.rel_tol * rho * (&uz + ms.transpose() * &uw).norm();

        if settings.polish {
            if let Some(support) = schedule.observe(iter, nonzero_pattern(&z)) {
                match polish_ineq(&ms, &ys, eta_s, &support, &z, settings) {
                    Some(p) if p.certified => {
                        return Ok(finish_ineq(m, y, eta, p, true, iter));
                    }
                    _ => schedule.failed(iter, support),
                }
            }
        }
        if r_norm <= eps_pri && dual_res <= eps_dual {
            converged = true;
            break;
        }
        if iter % RHO_UPDATE_EVERY == 0 {
            let scale = if r_norm > RHO_BALANCE * dual_res {
                RHO_FACTOR
            } else if dual_res > RHO_BALANCE * r_norm {
                1.0 / RHO_FACTOR
            } else {
                1.0
            };
            if scale != 1.0 && (rho * scale) <= RHO_MAX && (rho * scale) >= RHO_MIN {
                rho *= scale;
                uz /= scale;
                uw /= scale;
                thr = 1.0 / rho;
            }
        }
    }
    if settings.polish {
        let support = nonzero_pattern(&z);
        if !support.is_empty() {
            if let Some(p) = polish_ineq(&ms, &ys, eta_s, &support, &z, settings) {
                let certified = p.certified;
                if certified || (converged && l1_norm(&p.z) <= l1_norm(&z) * (1.0 + settings.opt_tol)) {
                    return Ok(finish_ineq(m, y, eta, p, certified, iterations));
                }
            }
        }
    }
    let primal = ((m * &z - y).norm() - eta).max(0.0);
    Ok(BpSolution {
        objective: l1_norm(&z),
        z: CoefVector::new(z),
        primal_residual: primal,
        dual_residual: dual_res,
        converged,
        certified: false,
        iterations,
    })
}

fn finish_ineq(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    eta: f64,
    p: Polished,
    certified: bool,
    iterations: usize,
) -> BpSolution {
    let primal = ((m * &p.z - y).norm() - eta).max(0.0);
    BpSolution {
        objective: l1_norm(&p.z),
        z: CoefVector::new(p.z),
        primal_residual: primal,
        dual_residual: p.violation,
        converged: true,
        certified,
        iterations,
    }
}

/// On a fixed support with signs `σ`, the optimum of `σᵀz_S` over the
/// ellipsoid `‖M_S z_S − y‖ ≤ η` is `z_ls − t·G⁺σ` with `G = M_SᵀM_S` and
/// `t = √((η² − ‖r_ls‖²)/σᵀG⁺σ)`. Optimality over all of `R^d` holds iff
/// `|M_jᵀ r| ≤ t` off the support, where `r` is the final residual.
fn polish_ineq(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    eta: f64,
    support: &[usize],
    z: &DVector<f64>,
    settings: &SolverSettings,
) -> Option<Polished> {
    let d = m.ncols();
    let ms = m.select_columns(support.iter());
    let signs = DVector::from_iterator(support.len(), support.iter().map(|&i| z[i].signum()));
    let svd = ms.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = smax * 1e-10 * (ms.nrows().max(ms.ncols()) as f64);
    let z_ls = svd.solve(y, cut).ok()?;
    let r_ls = y - &ms * &z_ls;
    let slack = eta * eta - r_ls.norm_squared();
    if slack < 0.0 {
        return None;
    }
    let vt = svd.v_t.as_ref()?;
    let mut proj = vt * &signs;
    for (k, s) in svd.singular_values.iter().enumerate() {
        proj[k] = if *s > cut { proj[k] / (s * s) } else { 0.0 };
    }
    let ginv_sign = vt.transpose() * proj;
    let q = signs.dot(&ginv_sign);
    if !(q > 0.0) {
        return None;
    }
    let t = (slack / q).sqrt();
    let zs = &z_ls - &ginv_sign * t;
    if !signs_match(zs.as_slice(), signs.as_slice()) || !(t > 0.0) {
        return None;
    }
    let full = scatter(d, support, &zs);
    let r = y - m * &full;
    let corr = m.transpose() * &r / t;
    let mut violation: f64 = 0.0;
    let mut on_support = vec![false; d];
    for (k, &i) in support.iter().enumerate() {
        on_support[i] = true;
        violation = violation.max((corr[i] - signs[k]).abs());
    }
    for j in 0..d {
        if !on_support[j] {
            violation = violation.max(corr[j].abs() - 1.0);
        }
    }
    let primal = (r.norm() - eta).max(0.0);
    if primal > settings.feas_tol * y.norm().max(1.0) {
        return None;
    }
    Some(Polished {
        z: full,
        certified: violation <= settings.cert_tol,
        primal,
        violation: violation.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn identity_equality() {
        let m = DMatrix::identity(3, 3);
        let y = DVector::from_vec(vec![1.0, -2.0, 0.0]);
        let sol = solve_bp_eq(&m, &y, &settings()).unwrap();
        assert!(sol.converged);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.z.entries() - &y).amax() < 1e-9);
    }

    #[test]
    fn single_row_equality() {
        let m = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![2.0]);
        let sol = solve_bp_eq(&m, &y, &settings()).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-8);
        let z = sol.z.entries();
        assert!(z[0] >= -1e-12 && z[1] >= -1e-12);
        assert!((z[0] + z[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_equality_is_reported() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, -1.0]);
        assert!(matches!(
            solve_bp_eq(&m, &y, &settings()),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn ball_contains_origin() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![0.3, 0.4]);
        let sol = solve_bp_ineq(&m, &y, 0.5, &settings()).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(solve_bp_ineq(&m, &y, -1.0, &settings()).is_err());
    }

    #[test]
    fn identity_ball_shrinks_along_axis() {
        let m = DMatrix::identity(2, 2);
        let y = DVector::from_vec(vec![3.0, 0.0]);
        let sol = solve_bp_ineq(&m, &y, 1.0, &settings()).unwrap();
        assert!(sol.converged);
        assert!((sol.z.entries()[0] - 2.0).abs() < 1e-8);
        assert!(sol.z.entries()[1].abs() < 1e-8);
        assert!((sol.objective - 2.0).abs() < 1e-8);
    }

    #[test]
    fn weighted_prefers_cheap_atom() {
        let m = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0]);
        let sol = solve_bp_eq_weighted(&m, &y, Some(&[1.0, 1.1]), &settings()).unwrap();
        assert!(sol.certified);
        assert!((sol.z.entries()[0] - 1.0).abs() < 1e-9);
        assert_eq!(sol.z.entries()[1], 0.0);
    }

    #[test]
    fn rejects_bad_settings() {
        let mut s = settings();
        s.over_relaxation = 2.5;
        let m = DMatrix::identity(1, 1);
        assert!(solve_bp_eq(&m, &DVector::from_vec(vec![1.0]), &s).is_err());
    }
}
