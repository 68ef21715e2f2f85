use thiserror::Error;

/// Errors produced by the dictionary, solver, cone and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("infeasible problem: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Infeasible { residual: f64, tolerance: f64 },

    #[error("nnls did not converge after {iterations} iterations (kkt violation {kkt_violation:.3e})")]
    NnlsNotConverged {
        coefficients: Vec<f64>,
        kkt_violation: f64,
        iterations: usize,
    },

    #[error("cone not strictly pointed within tolerance (best cos alpha = {cos_alpha:.3e})")]
    NotPointed { cos_alpha: f64 },

    #[error("circumcenter certificate failed: gap {gap:.3e}")]
    Certificate { gap: f64 },

    #[error("inconsistent representer: objective drift {drift:.3e} exceeds {tolerance:.3e}")]
    Inconsistent { drift: f64, tolerance: f64 },

    #[error("projection failed on sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
