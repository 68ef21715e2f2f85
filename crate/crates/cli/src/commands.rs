//! The `phase`, `noise` and `geometry` commands.

use std::io::Write;
use std::path::Path;

use synthlab_core::cone::{
    coherence_circumangle_bound, corollary_sampling_rate, descent_generators,
    lineality_decompose, maximal_representer, sampling_bound_condition, width_bound_gauge,
    width_bound_polyhedral, SIGN_RTOL,
};
use synthlab_core::dict::{
    coherence, fmt_f64, make_conv_pair, make_duplicated_identity, make_gaussian,
    make_haar_redundant, make_identity, make_superres, make_tv_pinv, SUPERRES_SIGMA,
};
use synthlab_core::lab::{
    default_noise_measurements, run_noise_sweep, run_phase_fixed, run_phase_full,
    write_noise_csv, write_phase_csv, PhaseFullPlan,
};
use synthlab_core::rng::rng_from;
use synthlab_core::signals;
use synthlab_core::solve::solve_bp_eq;
use synthlab_core::width::{
    estimate_statdim, estimate_statdim_decomposed, predict_m0_from_estimate,
    sparse_descent_width_bound, upper_bound_lambda_min, EnsembleConstants,
};
use synthlab_core::{CoefVector, Dictionary, Error, SignalVector, SolverSettings};

use crate::config::{Command, DictKind, PhaseMode, RepresenterKind, RunConfig, SignalKind};
use crate::output::{write_manifest, CsvTarget};
use crate::{CliError, MAX_FAILURE_RATE};

/// Construction errors come from the configuration; anything later is a
/// runtime failure.
fn config_err(e: Error) -> CliError {
    match e {
        Error::Construction(msg) | Error::Domain(msg) => CliError::Config(msg),
        other => CliError::Core(other),
    }
}

pub fn build_dictionary(cfg: &RunConfig, n: usize) -> Result<Dictionary, CliError> {
    let dc = &cfg.dictionary;
    let dict = match dc.kind {
        DictKind::Identity => make_identity(n),
        DictKind::DupIdentity => make_duplicated_identity(n),
        DictKind::Gaussian => make_gaussian(n, cfg.atoms(n), cfg.dictionary_seed()),
        DictKind::Haar => make_haar_redundant(n, dc.levels),
        DictKind::ConvPair => make_conv_pair(n),
        DictKind::Superres => {
            let sigma = if dc.sigma > 0.0 {
                dc.sigma
            } else {
                SUPERRES_SIGMA * n as f64 / 256.0
            };
            make_superres(n, sigma)
        }
        DictKind::Tv => make_tv_pinv(n),
    }
    .map_err(config_err)?;
    if dc.normalize {
        dict.normalized().map_err(config_err)
    } else {
        Ok(dict)
    }
}

enum Drawn {
    Coef(CoefVector),
    Signal(SignalVector),
}

fn draw(cfg: &RunConfig, dict: &Dictionary) -> Result<Drawn, CliError> {
    let sig = &cfg.signal;
    let n = dict.n();
    let mut rng = rng_from(cfg.signal_seed(), &[]);
    let drawn = match sig.kind {
        SignalKind::Random => Drawn::Coef(signals::random_support(&mut rng, dict.d(), sig.s).map_err(config_err)?),
        SignalKind::TwoBlocks => {
            let blocks = dict.d() / n;
            let block = sig.block.unwrap_or(blocks - 1);
            Drawn::Coef(signals::two_blocks(&mut rng, n, blocks, block, sig.s).map_err(config_err)?)
        }
        SignalKind::OppositeSpikes => {
            if dict.d() != n {
                return Err(CliError::Config("opposite-spikes needs a square dictionary".into()));
            }
            Drawn::Coef(signals::opposite_spikes(n).map_err(config_err)?)
        }
        SignalKind::Endpoint => Drawn::Signal(signals::endpoint_signal(n, sig.a, sig.b).map_err(config_err)?),
        SignalKind::TvJumps => Drawn::Signal(signals::tv_jumps(n, sig.jumps).map_err(config_err)?),
    };
    Ok(drawn)
}

/// The coefficient vector every command works with.
pub fn reference(cfg: &RunConfig, dict: &Dictionary, settings: &SolverSettings) -> Result<CoefVector, CliError> {
    let drawn = draw(cfg, dict)?;
    let rep = match (cfg.signal.representer, cfg.signal.kind) {
        (RepresenterKind::Auto, SignalKind::Endpoint) => RepresenterKind::Maximal,
        (RepresenterKind::Auto, SignalKind::TvJumps) => RepresenterKind::Gradient,
        (RepresenterKind::Auto, _) => RepresenterKind::AsIs,
        (r, _) => r,
    };
    let x = match &drawn {
        Drawn::Coef(z) => dict.synthesize(z),
        Drawn::Signal(x) => x.clone(),
    };
    let z = match (rep, drawn) {
        (RepresenterKind::AsIs, Drawn::Coef(z)) => z,
        (RepresenterKind::AsIs, Drawn::Signal(_)) => {
            return Err(CliError::Config("representer 'as-is' needs a coefficient recipe".into()))
        }
        (RepresenterKind::Bp, _) => {
            let sol = solve_bp_eq(dict.matrix(), x.entries(), settings)?;
            if !sol.converged {
                log::warn!("minimal representer solve did not converge");
            }
            sol.z.thresholded(SIGN_RTOL)
        }
        (RepresenterKind::Maximal, _) => maximal_representer(dict, &x, cfg.signal_seed(), settings)?,
        (RepresenterKind::Gradient, _) => {
            if cfg.dictionary.kind != DictKind::Tv {
                return Err(CliError::Config("the gradient representer needs the tv dictionary".into()));
            }
            signals::gradient_representer(&x)
        }
        (RepresenterKind::Auto, _) => unreachable!("resolved above"),
    };
    if z.sparsity() == 0 {
        return Err(CliError::Config("the reference coefficients are zero".into()));
    }
    Ok(z)
}

fn check_failures(rate: f64, what: &str) -> Result<(), CliError> {
    if rate > MAX_FAILURE_RATE {
        return Err(CliError::SolverFailures(format!(
            "{:.2}% of {what} solves failed (limit {:.0}%); the CSV is kept",
            100.0 * rate,
            100.0 * MAX_FAILURE_RATE
        )));
    }
    Ok(())
}

pub fn execute(command: Command, cfg: &RunConfig, preset: Option<&str>) -> Result<(), CliError> {
    cfg.validate(command)?;
    if command == Command::Noise && cfg.width.samples < 2 {
        return Err(CliError::Config("the noise sweep needs width.samples >= 2".into()));
    }
    let dir = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(dir)?;
    let manifest = write_manifest(dir, command.name(), preset, cfg)?;
    log::info!("manifest written to {}", manifest.display());
    let name = format!("{}.csv", command.name());
    let target = CsvTarget::new(dir, &name);
    let result = match command {
        Command::Phase => phase(cfg, &target),
        Command::Noise => noise(cfg, &target),
        Command::Geometry => geometry(cfg, &target),
    };
    match &result {
        // the CSV is complete; only the failure rate is out of bounds
        Err(CliError::SolverFailures(_)) => {}
        Err(_) => target.remove(),
        Ok(()) => log::info!("wrote {}", target.path().display()),
    }
    result
}

fn phase(cfg: &RunConfig, target: &CsvTarget) -> Result<(), CliError> {
    let n = cfg.dictionary.n;
    let dict = build_dictionary(cfg, n)?;
    let settings = cfg.solver.settings();
    let kind = cfg.ensemble()?;
    let m_values = cfg.m_values(n);
    let e = &cfg.experiment;
    let grid = match e.mode {
        PhaseMode::Fixed => {
            let z = reference(cfg, &dict, &settings)?;
            let mut grid = run_phase_fixed(&dict, &z, &m_values, e.trials, cfg.master_seed, kind, &settings)?;
            if cfg.width.samples >= 2 {
                let cone = descent_generators(&dict, &z)?;
                let w = estimate_statdim(&cone, cfg.width.samples, cfg.width_seed())?;
                log::info!("statdim {:.3} ± {:.3}", w.statdim, w.stderr);
                grid.overlay = Some(vec![(w.statdim, w.stderr)]);
            }
            grid
        }
        PhaseMode::Full => {
            let plan = PhaseFullPlan {
                s_values: cfg.s_values(),
                m_values,
                signals: e.signals,
                repetitions: e.repetitions,
                width_samples: cfg.width.samples,
                kind,
            };
            run_phase_full(&dict, &plan, cfg.master_seed, &settings)?
        }
    };
    for (si, s) in grid.s_values.iter().enumerate() {
        let cross = synthlab_core::lab::crossing_point(&grid.m_values, &grid.sig_fractions(si), 0.5);
        let overlay = grid.overlay.as_ref().map(|o| o[si].0);
        log::info!(
            "s = {s}: 50% signal crossing {}, statdim {}",
            cross.map_or("none".into(), |c| format!("{c:.1}")),
            overlay.map_or("-".into(), |v| format!("{v:.1}"))
        );
    }
    target.write(|out| write_phase_csv(&grid, out).map_err(CliError::from))?;
    check_failures(grid.solver_failure_rate(), "phase")
}

fn noise(cfg: &RunConfig, target: &CsvTarget) -> Result<(), CliError> {
    let n = cfg.dictionary.n;
    let dict = build_dictionary(cfg, n)?;
    let settings = cfg.solver.settings();
    let kind = cfg.ensemble()?;
    let z = reference(cfg, &dict, &settings)?;
    let cone = descent_generators(&dict, &z)?;
    let w = estimate_statdim(&cone, cfg.width.samples, cfg.width_seed())?;
    let constants = EnsembleConstants {
        c_const: cfg.width.c_const,
        gamma: cfg.width.gamma,
    };
    let prediction = predict_m0_from_estimate(&w, cfg.width.u, constants)?;
    let m = match cfg.experiment.m {
        0 => {
            let m = default_noise_measurements(w.statdim);
            if m > n {
                log::warn!("ceil(statdim) + 40 = {m} exceeds n = {n}; using m = n");
            }
            m.min(n)
        }
        m => m,
    };
    log::info!(
        "statdim {:.3} ± {:.3}, m0 {:.3}, m = {m}",
        w.statdim,
        w.stderr,
        prediction.m0
    );
    let sweep = run_noise_sweep(
        &dict,
        &z,
        m,
        &cfg.eta_values(),
        cfg.experiment.trials,
        cfg.master_seed,
        kind,
        &prediction,
        &settings,
    )?;
    let violations: usize = sweep.bound_violations.iter().sum();
    log::info!(
        "{violations} of {} trials above the signal-error bound",
        sweep.trials * sweep.eta_values.len()
    );
    target.write(|out| write_noise_csv(&sweep, out).map_err(CliError::from))?;
    check_failures(sweep.solver_failure_rate(), "noise")
}

pub const GEOMETRY_HEADER: &str = "label,n,d,support,lineality_dim,range_generators,alpha,tan_sq_alpha,\
statdim,statdim_stderr,coherence,lambda_min_ub,kappa_lb,bound_condition,bound_polyhedral,\
bound_coherence,bound_gauge,corollary_rate";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn geometry_row(cfg: &RunConfig, n: usize, settings: &SolverSettings) -> Result<String, CliError> {
    let dict = build_dictionary(cfg, n)?;
    let z = reference(cfg, &dict, settings)?;
    let d = dict.d();
    let dec = lineality_decompose(&dict, &z, Some(cfg.width.cert_tol))?;
    let s_bar = dec.support_size;
    let alpha = dec.circum_alpha;
    let tan_sq = dec.tan_sq_alpha();
    let width = if cfg.width.samples >= 2 {
        Some(estimate_statdim_decomposed(&dec, cfg.width.samples, cfg.width_seed())?)
    } else {
        None
    };
    let mu = if d >= 2 { Some(coherence(&dict)?) } else { None };
    let lambda_ub = if cfg.width.lambda_perturbations > 0 {
        Some(upper_bound_lambda_min(&dict, &z, cfg.width.lambda_perturbations, cfg.width_seed(), settings)?)
    } else {
        None
    };
    // ‖D‖/λ_ub under-estimates κ, so the condition bound is a lower estimate
    let kappa_lb = lambda_ub.filter(|l| l.is_finite() && *l > 0.0).map(|l| dict.spectral_norm() / l);
    let bound_condition = match (kappa_lb, sparse_descent_width_bound(s_bar, d)) {
        (Some(k), Ok(w2)) => Some(sampling_bound_condition(k, w2)),
        _ => None,
    };
    let k = dec.range_generator_count();
    let bound_polyhedral = alpha.and_then(|a| width_bound_polyhedral(a, k).ok());
    let bound_coherence = match mu {
        Some(mu) if dict.has_unit_atoms() => coherence_circumangle_bound(s_bar, mu).ok(),
        _ => None,
    };
    let bound_gauge = alpha.and_then(|a| width_bound_gauge(s_bar, d, a).ok());
    let corollary = tan_sq.and_then(|t| corollary_sampling_rate(s_bar, d, t).ok());
    log::info!(
        "n = {n}: support {s_bar}, lineality {}, tan^2 alpha {}",
        dec.lineality_dim(),
        tan_sq.map_or("-".into(), |t| format!("{t:.4}"))
    );
    Ok(format!(
        "{},{n},{d},{s_bar},{},{k},{},{},{},{},{},{},{},{},{},{},{},{}",
        dict.label(),
        dec.lineality_dim(),
        opt(alpha),
        opt(tan_sq),
        opt(width.as_ref().map(|w| w.statdim)),
        opt(width.as_ref().map(|w| w.stderr)),
        opt(mu),
        opt(lambda_ub),
        opt(kappa_lb),
        opt(bound_condition),
        opt(bound_polyhedral),
        opt(bound_coherence),
        opt(bound_gauge),
        opt(corollary),
    ))
}

fn geometry(cfg: &RunConfig, target: &CsvTarget) -> Result<(), CliError> {
    let settings = cfg.solver.settings();
    let mut rows = Vec::new();
    for n in cfg.n_values() {
        rows.push(geometry_row(cfg, n, &settings)?);
    }
    target.write(|out| {
        writeln!(out, "{GEOMETRY_HEADER}")?;
        for row in &rows {
            writeln!(out, "{row}")?;
        }
        Ok(())
    })
}
