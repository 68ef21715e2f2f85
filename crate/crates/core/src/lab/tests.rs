use super::*;
use crate::dict::{make_duplicated_identity, make_haar_redundant, make_identity};
use crate::width::{predict_m0, EnsembleConstants};

fn settings() -> SolverSettings {
    SolverSettings::default()
}

#[test]
fn measurement_draws() {
    let ens = MeasurementEnsemble {
        kind: EnsembleKind::Gaussian,
        m: 3,
        n: 3,
        seed: 7,
    };
    assert_eq!(draw_measurements(&ens).unwrap(), draw_measurements(&ens).unwrap());
    let rad = draw_measurements(&MeasurementEnsemble {
        kind: EnsembleKind::Rademacher,
        m: 20,
        n: 30,
        seed: 1,
    })
    .unwrap();
    assert!(rad.iter().all(|&v| v == 1.0 || v == -1.0));
    let col = draw_measurements(&MeasurementEnsemble {
        kind: EnsembleKind::Gaussian,
        m: 2000,
        n: 1,
        seed: 3,
    })
    .unwrap();
    let mean = col.mean();
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 1999.0;
    assert!(mean.abs() < 0.07 && (var - 1.0).abs() < 0.1, "{mean} {var}");
    assert_eq!("rademacher".parse::<EnsembleKind>().unwrap(), EnsembleKind::Rademacher);
    assert!("bernoulli".parse::<EnsembleKind>().is_err());
}

#[test]
fn full_rank_trial_recovers() {
    let d = make_identity(8).unwrap();
    let z = CoefVector::from_sparse(8, &[2, 5], &[1.0, -0.5]).unwrap();
    let seeds = TrialSeeds { ensemble: 4, noise: 4 };
    let t = run_trial(&d, &z, 8, 0.0, EnsembleKind::Gaussian, seeds, &settings()).unwrap();
    assert!(t.coef_success && t.sig_success && t.solver_converged, "{t:?}");
}

#[test]
fn single_measurement_fails() {
    let d = make_identity(64).unwrap();
    let mut rng = rng_from(2, &[]);
    let z = CoefVector::random_sparse(&mut rng, 64, 8).unwrap();
    for seed in 0..20 {
        let seeds = TrialSeeds { ensemble: seed, noise: seed };
        let t = run_trial(&d, &z, 1, 0.0, EnsembleKind::Gaussian, seeds, &settings()).unwrap();
        assert!(!t.coef_success);
    }
}

#[test]
fn huge_noise_returns_origin() {
    let d = make_identity(6).unwrap();
    let z = CoefVector::from_sparse(6, &[0, 3], &[1e-3, 2e-3]).unwrap();
    let mut origin_hits = 0;
    for seed in 0..12 {
        let seeds = TrialSeeds { ensemble: seed, noise: seed + 100 };
        let t = run_trial(&d, &z, 4, 1e6, EnsembleKind::Gaussian, seeds, &settings()).unwrap();
        if t.coef_err == z.entries().norm() {
            origin_hits += 1;
            assert_eq!(t.sig_err, (d.matrix() * z.entries()).norm());
        }
    }
    assert!(origin_hits >= 2);
}

#[test]
fn phase_fixed_grid() {
    let d = make_identity(12).unwrap();
    let z = CoefVector::from_sparse(12, &[1, 7], &[2.0, -1.0]).unwrap();
    let g = run_phase_fixed(&d, &z, &[12], 1, 3, EnsembleKind::Gaussian, &settings()).unwrap();
    assert_eq!(g.success_counts_sig, vec![vec![1]]);
    assert_eq!(g.success_counts_coef, vec![vec![1]]);

    let ms: Vec<usize> = (1..=12).collect();
    let trials = 8;
    let g = run_phase_fixed(&d, &z, &ms, trials, 5, EnsembleKind::Gaussian, &settings()).unwrap();
    let raw = g.sig_fractions(0);
    let fit = isotonic_increasing(&raw);
    let slack = 1.0 / trials as f64 + 1e-12;
    assert!(raw.iter().zip(&fit).all(|(r, f)| (r - f).abs() <= slack), "{raw:?}");
    for si in 0..1 {
        for mi in 0..ms.len() {
            let c = g.success_counts_coef[si][mi] + g.solver_failures[si][mi];
            assert!(c <= trials);
        }
    }
    assert!(g.trials.iter().all(|t| t.sig_err <= t.coef_err + 1e-10));
}

#[test]
fn phase_full_grid() {
    let d = make_haar_redundant(16, 2).unwrap();
    let plan = PhaseFullPlan {
        s_values: vec![1, 3],
        m_values: vec![4, 10, 16],
        signals: 2,
        repetitions: 2,
        width_samples: 20,
        kind: EnsembleKind::Gaussian,
    };
    let g = run_phase_full(&d, &plan, 9, &settings()).unwrap();
    assert_eq!(g.trials_per_cell, 4);
    assert_eq!(g.success_counts_sig[0][2], 4);
    let norm = d.spectral_norm();
    for t in &g.trials {
        if t.coef_success {
            assert!(t.sig_err < SUCCESS_THRESHOLD * (1.0 + norm));
        }
        assert!(t.sig_err <= norm * t.coef_err + 1e-10);
    }
    let overlay = g.overlay.as_ref().unwrap();
    assert!(overlay[0].0 < overlay[1].0);

    let mut a = Vec::new();
    let mut b = Vec::new();
    write_phase_csv(&g, &mut a).unwrap();
    write_phase_csv(&run_phase_full(&d, &plan, 9, &settings()).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), PHASE_HEADER);
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(run_phase_full(&d, &PhaseFullPlan { s_values: vec![49], ..plan }, 9, &settings()).is_err());
}

#[test]
fn pav_and_crossing() {
    let fit = isotonic_increasing(&[0.0, 0.4, 0.2, 0.8]);
    assert!(fit.iter().zip([0.0, 0.3, 0.3, 0.8]).all(|(a, b)| (a - b).abs() < 1e-15));
    assert_eq!(isotonic_increasing(&[1.0, 0.0, 0.0]), vec![1.0 / 3.0; 3]);
    let m = [2, 4, 6, 8];
    assert_eq!(crossing_point(&m, &[0.0, 0.25, 0.75, 1.0], 0.5), Some(5.0));
    assert_eq!(crossing_point(&m, &[0.6, 0.7, 0.8, 1.0], 0.5), Some(2.0));
    assert_eq!(crossing_point(&m, &[0.0, 0.1, 0.2, 0.3], 0.5), None);
}

#[test]
fn noise_sweep_below_bound() {
    let d = make_identity(20).unwrap();
    let z = CoefVector::from_sparse(20, &[3, 11], &[1.0, -1.0]).unwrap();
    let m = 18;
    let pred = predict_m0(6.0, 0.0, EnsembleConstants::GAUSSIAN).unwrap();
    let etas = [0.0, 0.05, 0.1];
    let sweep = run_noise_sweep(&d, &z, m, &etas, 10, 4, EnsembleKind::Gaussian, &pred, &settings()).unwrap();
    assert!(sweep.mean_sig_err[0] < SUCCESS_THRESHOLD);
    let violations: usize = sweep.bound_violations.iter().sum();
    assert!(violations as f64 <= 0.05 * 30.0);
    for (e, b) in sweep.bound_sig.iter().enumerate() {
        assert!(sweep.mean_sig_err[e] <= b.unwrap() + SUCCESS_THRESHOLD);
    }
    let mut out = Vec::new();
    write_noise_csv(&sweep, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(2).unwrap().starts_with("5.0000000000000003e-2,10,"));
}

#[test]
fn duplicated_identity_noise() {
    let n = 8;
    let d = make_duplicated_identity(n).unwrap();
    let z = CoefVector::from_sparse(2 * n, &[0], &[1.0]).unwrap();
    let pred = predict_m0(2.0, 0.0, EnsembleConstants::GAUSSIAN).unwrap();
    let sweep = run_noise_sweep(&d, &z, n, &[0.0, 0.01], 6, 2, EnsembleKind::Gaussian, &pred, &settings()).unwrap();
    assert!(sweep.mean_sig_err[0] < SUCCESS_THRESHOLD);
    assert!(sweep.mean_sig_err[1] < 0.1);
    assert!(sweep.mean_coef_err.iter().all(|&e| e > 0.3));
}
