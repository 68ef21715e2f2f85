//! Closed-form width and sampling-rate bounds.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..PI / 2.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, pi/2), got {alpha}")));
    }
    Ok(())
}

/// `x + 1/x` with `x = √(2 log(k/√(2π)))`: a bound on the Gaussian mean
/// width of a polytope with `k` vertices in the unit ball.
pub fn polytope_width_bound(k: usize) -> Result<f64> {
    if k < 5 {
        return Err(Error::Domain(format!("polytope bound needs k >= 5, got {k}")));
    }
    let x = (2.0 * (k as f64 / sqrt_2pi()).ln()).sqrt();
    Ok(x + 1.0 / x)
}

/// Conic mean width bound for a `k`-polyhedral cone of circumangle `alpha`.
pub fn width_bound_polyhedral(alpha: f64, k: usize) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha.tan() * polytope_width_bound(k)? + 1.0 / sqrt_2pi())
}

/// Squared conic mean width bound of the gauge descent cone in terms of the
/// maximal support `s_bar` and the range circumangle.
pub fn width_bound_gauge(s_bar: usize, d: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if s_bar + 3 > d {
        return Err(Error::Domain(format!("need s_bar <= d - 3, got s_bar = {s_bar}, d = {d}")));
    }
    let k = 2.0 * (d - s_bar) as f64;
    let root = (2.0 * (k / sqrt_2pi()).ln()).sqrt();
    let inner = alpha.tan() * (root + 1.0) + 1.0 / sqrt_2pi();
    Ok(s_bar as f64 + inner * inner)
}

/// `s̄ + tan²α · log(2(d − s̄)/√(2π))`, the leading-order sampling rate.
pub fn corollary_sampling_rate(s_bar: usize, d: usize, tan_sq_alpha: f64) -> Result<f64> {
    if s_bar >= d {
        return Err(Error::Domain("need s_bar < d".into()));
    }
    if !(tan_sq_alpha >= 0.0) {
        return Err(Error::Domain("tan^2 alpha must be nonnegative".into()));
    }
    let k = 2.0 * (d - s_bar) as f64;
    Ok(s_bar as f64 + tan_sq_alpha * (k / sqrt_2pi()).ln())
}

/// `κ²·(w² + 1)`; an infinite condition number passes through.
pub fn sampling_bound_condition(kappa: f64, width_sq: f64) -> f64 {
    if kappa.is_infinite() {
        return f64::INFINITY;
    }
    kappa * kappa * (width_sq + 1.0)
}

/// `s(1 − sμ)/(1 − 2sμ)²`.
///
/// Requires `2sμ < 1`. The usual uniqueness condition `s < (1 + 1/μ)/2` is
/// weaker and does not suffice: past `2sμ = 1` the estimate breaks down.
pub fn coherence_circumangle_bound(s: usize, mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("coherence must lie in [0, 1], got {mu}")));
    }
    let s_f = s as f64;
    let sm = s_f * mu;
    if 2.0 * sm >= 1.0 {
        return Err(Error::Domain(format!(
            "coherence bound needs 2 s mu < 1, got s = {s}, mu = {mu}"
        )));
    }
    Ok(s_f * (1.0 - sm) / ((1.0 - 2.0 * sm) * (1.0 - 2.0 * sm)))
}
