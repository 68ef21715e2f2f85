//! Numerical laboratory for ℓ¹-synthesis compressed sensing.
//!
//! The crate is organized bottom-up:
//!
//! * [`dict`] builds dictionaries (identity, Gaussian, redundant Haar,
//!   convolutional pair, super-resolution, total-variation pseudoinverse),
//!   measures coherence and runs orthogonal matching pursuit.
//! * [`solve`] holds the convex subroutines: equality and noise-aware basis
//!   pursuit, nonnegative least squares, cone projection, circumcenters and
//!   the representer-uniqueness heuristic.
//! * [`cone`] builds the transformed descent cones `D·D∧(‖·‖₁; z)`, splits
//!   them into lineality space and range and evaluates the analytic bounds.
//! * [`width`] estimates statistical dimensions by Monte Carlo and turns
//!   them into sampling-rate and error predictions.
//! * [`lab`] runs the phase-transition and noise-robustness experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod dict;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod rng;
pub mod signals;
pub mod solve;
pub mod width;

pub use cone::{ConeDecomposition, PolyhedralCone};
pub use dict::{CoefVector, Dictionary, SignalVector};
pub use error::{Error, Result};
pub use lab::{MeasurementEnsemble, NoiseSweep, PhaseGrid, TrialResult};
pub use solve::{BpSolution, SolverSettings};
pub use width::{SamplingPrediction, WidthEstimate};

/// Recovery is declared successful when the error is below this threshold.
pub const SUCCESS_THRESHOLD: f64 = 1e-5;
