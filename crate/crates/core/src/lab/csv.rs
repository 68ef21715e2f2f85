use std::io::Write;

use super::{NoiseSweep, PhaseGrid};
use crate::dict::fmt_f64;
use crate::error::Result;

pub const PHASE_HEADER: &str =
    "s,m,trials,coef_successes,sig_successes,solver_failures,statdim,statdim_stderr";
pub const NOISE_HEADER: &str = "eta,trials,mean_coef_err,mean_sig_err,bound_sig";

pub fn write_phase_csv<W: Write>(grid: &PhaseGrid, mut out: W) -> Result<()> {
    writeln!(out, "{PHASE_HEADER}")?;
    for (si, &s) in grid.s_values.iter().enumerate() {
        let (statdim, stderr) = match &grid.overlay {
            Some(o) => (fmt_f64(o[si].0), fmt_f64(o[si].1)),
            None => (String::new(), String::new()),
        };
        for (mi, &m) in grid.m_values.iter().enumerate() {
            writeln!(
                out,
                "{s},{m},{},{},{},{},{statdim},{stderr}",
                grid.trials_per_cell,
                grid.success_counts_coef[si][mi],
                grid.success_counts_sig[si][mi],
                grid.solver_failures[si][mi],
            )?;
        }
    }
    Ok(())
}

pub fn write_noise_csv<W: Write>(sweep: &NoiseSweep, mut out: W) -> Result<()> {
    writeln!(out, "{NOISE_HEADER}")?;
    for (e, &eta) in sweep.eta_values.iter().enumerate() {
        let bound = sweep.bound_sig[e].map(fmt_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(eta),
            sweep.trials,
            fmt_f64(sweep.mean_coef_err[e]),
            fmt_f64(sweep.mean_sig_err[e]),
            bound
        )?;
    }
    Ok(())
}
