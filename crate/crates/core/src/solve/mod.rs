//! Convex subroutines: basis pursuit (equality and ℓ₂-ball constrained),
//! nonnegative least squares, cone projection, circumcenters and the
//! representer-uniqueness heuristic.

mod bp;
mod circum;
mod nnls;
mod unique;

pub use bp::{solve_bp_eq, solve_bp_eq_weighted, solve_bp_ineq};
pub use circum::{
    circumcenter, circumcenter_subgradient, in_convex_hull, Circumcenter, SubgradientSettings,
};
pub use nnls::{nnls, project_cone, ConeProjector, NnlsSolution, Projection};
pub(crate) use unique::random_direction;
pub use unique::{antithetic_pair, is_unique_representer, perturbed_bp, PERTURBATION_SCALES};

use crate::dict::CoefVector;
use crate::error::{Error, Result};

/// Parameters shared by the operator-splitting solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Augmented-Lagrangian penalty ρ.
    pub penalty: f64,
    /// Over-relaxation factor in `[1, 1.9]`.
    pub over_relaxation: f64,
    /// Relative feasibility tolerance, `‖Mz − y‖ ≤ feas_tol · max(1, ‖y‖)`.
    pub feas_tol: f64,
    /// Relative objective tolerance used when comparing ℓ¹ values.
    pub opt_tol: f64,
    /// Relative slack accepted in the dual optimality certificate.
    pub cert_tol: f64,
    /// Refine iterates on their support and certify them with a dual vector.
    pub polish: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iters: 50_000,
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            penalty: 1.0,
            over_relaxation: 1.5,
            feas_tol: 1e-9,
            opt_tol: 1e-7,
            cert_tol: 1e-7,
            polish: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("penalty", self.penalty),
            ("feas_tol", self.feas_tol),
            ("opt_tol", self.opt_tol),
            ("cert_tol", self.cert_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be >= 1".into()));
        }
        if !(1.0..=1.9).contains(&self.over_relaxation) {
            return Err(Error::Domain(format!(
                "over_relaxation must lie in [1, 1.9], got {}",
                self.over_relaxation
            )));
        }
        Ok(())
    }
}

/// Output of a basis-pursuit solve.
#[derive(Debug, Clone)]
pub struct BpSolution {
    pub z: CoefVector,
    /// ℓ¹ norm of `z` (unweighted).
    pub objective: f64,
    /// Constraint violation of the returned `z`.
    pub primal_residual: f64,
    /// Dual residual of the last iterate, or the certificate violation when
    /// the solution was certified.
    pub dual_residual: f64,
    pub converged: bool,
    /// The returned point carries a dual optimality certificate.
    pub certified: bool,
    pub iterations: usize,
}
