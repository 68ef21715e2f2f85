use super::*;
use crate::dict::{make_conv_pair, make_duplicated_identity, make_gaussian, make_identity};
use crate::rng::{gaussian_vector, rng_from};
use proptest::prelude::*;
use rand::Rng;

fn conv_signal(n: usize, a: f64, b: f64) -> SignalVector {
    let mut x = DVector::zeros(n);
    x[0] = a;
    x[n - 1] = b;
    SignalVector::new(x)
}

#[test]
fn identity_two_generators() {
    let d = make_identity(2).unwrap();
    let z = CoefVector::from_sparse(2, &[0], &[1.0]).unwrap();
    let cone = descent_generators(&d, &z).unwrap();
    let expected = [[-2.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]];
    assert_eq!(cone.count(), 3);
    for (col, e) in cone.generators().column_iter().zip(expected) {
        assert_eq!(col[0], e[0]);
        assert_eq!(col[1], e[1]);
    }
    let mut rng = rng_from(2, &[]);
    let mut inside = 0;
    for _ in 0..400 {
        let h = gaussian_vector(&mut rng, 2);
        let margin = -(h[0] + h[1].abs());
        if margin.abs() < 1e-6 {
            continue;
        }
        let member = cone.contains(&h, 1e-9).unwrap();
        assert_eq!(member, margin > 0.0, "probe {h:?}");
        inside += member as usize;
    }
    assert!(inside > 50);
}

#[test]
fn identity_membership_matches_inequality() {
    let n = 7;
    let d = make_identity(n).unwrap();
    let z = CoefVector::from_sparse(n, &[1, 4, 5], &[0.3, -2.0, 1.0]).unwrap();
    let signs = sign_pattern(&z);
    let cone = descent_generators(&d, &z).unwrap();
    assert!(cone.count() <= 2 * n);
    let proj = cone.projector().unwrap();
    let mut rng = rng_from(9, &[]);
    let mut agree = 0;
    let mut inside = 0;
    for probe in 0..1000 {
        // half the probes are pushed toward the descent direction -sign(z)
        let mut h = gaussian_vector(&mut rng, n);
        if probe % 2 == 0 {
            h -= &signs * rng.random_range(0.0..3.0);
        }
        let on: f64 = z.support().iter().map(|&i| signs[i] * h[i]).sum();
        let off: f64 = (0..n).filter(|i| signs[*i] == 0.0).map(|i| h[i].abs()).sum();
        let margin = -on - off;
        if margin.abs() < 1e-6 {
            continue;
        }
        let member = proj.solve(&h).unwrap().residual.norm() <= 1e-9 * h.norm();
        assert_eq!(member, margin > 0.0);
        agree += 1;
        inside += member as usize;
    }
    assert!(agree > 990 && inside > 100);
}

#[test]
fn descent_cone_depends_on_signs_only() {
    let d = make_gaussian(5, 9, 3).unwrap();
    let z = CoefVector::from_sparse(9, &[2, 6], &[1.5, -0.25]).unwrap();
    let scaled = CoefVector::new(z.entries() * 3.7);
    assert_eq!(descent_generators(&d, &z).unwrap(), descent_generators(&d, &scaled).unwrap());
    assert!(descent_generators(&d, &CoefVector::zeros(9)).is_err());
}

#[test]
fn identity_decomposition() {
    for (n, s) in [(10usize, 1usize), (10, 3), (16, 5)] {
        let d = make_identity(n).unwrap();
        let idx: Vec<usize> = (0..s).map(|i| 2 * i).collect();
        let vals: Vec<f64> = (0..s).map(|i| if i % 2 == 0 { 1.0 + i as f64 } else { -0.5 }).collect();
        let z = CoefVector::from_sparse(n, &idx, &vals).unwrap();
        let dec = lineality_decompose(&d, &z, Some(1e-7)).unwrap();
        assert_eq!(dec.lineality_dim(), s - 1);
        assert_eq!(dec.range_generator_count(), 2 * (n - s));
        assert!((dec.tan_sq_alpha().unwrap() - s as f64).abs() < 1e-8);
    }
}

#[test]
fn conv_pair_decomposition() {
    for n in [8usize, 12] {
        let d = make_conv_pair(n).unwrap();
        let x0 = conv_signal(n, 2.0, 0.5);
        let z = maximal_representer(&d, &x0, 4, &SolverSettings::default()).unwrap();
        assert_eq!(z.support(), &[0, 1, n, n + 1]);
        assert!((z.l1_norm() - 2.0).abs() < 1e-7);
        let dec = lineality_decompose(&d, &z, Some(1e-7)).unwrap();
        assert_eq!(dec.lineality_dim(), 2);
        // the lineality space is span{e_2, e_n}: range generators vanish there
        let range = dec.range_cone.as_ref().unwrap();
        assert_eq!(range.count(), 2 * (2 * n - 4));
        for col in range.generators().column_iter() {
            assert!(col[1].abs() < 1e-10 && col[n - 1].abs() < 1e-10);
        }
        assert!((dec.cos_alpha().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-8);
    }
}

#[test]
fn lineality_vectors_stay_inside() {
    let d = make_gaussian(6, 12, 8).unwrap();
    let mut rng = rng_from(8, &[1]);
    let z = CoefVector::random_sparse(&mut rng, 12, 3).unwrap();
    let cone = descent_generators(&d, &z).unwrap();
    let dec = lineality_decompose(&d, &z, None).unwrap();
    assert!(dec.lineality_dim() <= 2);
    for v in dec.lineality_basis.column_iter() {
        let v = v.into_owned();
        assert!(cone.contains(&v, 1e-9).unwrap());
        assert!(cone.contains(&(-v), 1e-9).unwrap());
    }
    let range = dec.range_cone.unwrap();
    let cross = dec.lineality_basis.transpose() * range.generators();
    assert!(cross.amax() < 1e-8);
}

#[test]
fn full_support_is_rejected() {
    let d = make_identity(3).unwrap();
    let z = CoefVector::new(DVector::from_vec(vec![1.0, 1.0, 1.0]));
    assert!(lineality_decompose(&d, &z, None).is_err());
}

#[test]
fn representer_of_identity_is_the_signal() {
    let d = make_identity(6).unwrap();
    let x = SignalVector::new(DVector::from_vec(vec![0.0, 1.0, 0.0, -3.0, 0.0, 0.0]));
    let z = maximal_representer(&d, &x, 0, &SolverSettings::default()).unwrap();
    assert!((z.entries() - x.entries()).amax() < 1e-9);
}

#[test]
fn duplicated_identity_splits_evenly() {
    let n = 5;
    let d = make_duplicated_identity(n).unwrap();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let z = maximal_representer(&d, &SignalVector::new(e1), 1, &SolverSettings::default()).unwrap();
    assert_eq!(z.support(), &[0, n]);
    assert!((z.l1_norm() - 1.0).abs() < 1e-7);
    assert!((z.entries()[0] - 0.5).abs() < 1e-6);
}

#[test]
fn decomposition_csv_row() {
    let d = make_identity(6).unwrap();
    let z = CoefVector::from_sparse(6, &[0, 1], &[1.0, 1.0]).unwrap();
    let dec = lineality_decompose(&d, &z, Some(1e-7)).unwrap();
    let row = dec.csv_row();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 4);
    assert_eq!(fields[0], "1");
    assert_eq!(fields[1], "8");
    assert_eq!(fields[3].split(';').count(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn gauge_bound_exceeds_support(s_bar in 0usize..40, extra in 3usize..200, alpha in 0.0f64..1.5) {
        let v = width_bound_gauge(s_bar, s_bar + extra, alpha).unwrap();
        prop_assert!(v >= s_bar as f64);
    }

    #[test]
    fn lineality_dim_below_support(seed in 0u64..500, s in 1usize..5) {
        let d = make_gaussian(6, 10, seed).unwrap();
        let mut rng = rng_from(seed, &[2]);
        let z = CoefVector::random_sparse(&mut rng, 10, s).unwrap();
        let dec = lineality_decompose(&d, &z, None).unwrap();
        prop_assert!(dec.lineality_dim() < s.max(1));
        let cross = dec.lineality_basis.transpose() * dec.range_cone.unwrap().generators();
        prop_assert!(cross.amax() < 1e-8);
    }
}

#[test]
fn coherence_formula_fails_past_half() {
    // atoms at 0°, 45°, 90°: μ = 1/√2 and s = 1 < (1 + 1/μ)/2, yet 2sμ > 1.
    // The range generators span 112.5° in the plane, so α = 5π/16.
    let h = 0.5f64.sqrt();
    let m = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, h, h, 0.0, 1.0]);
    let d = Dictionary::new(m, "three-lines").unwrap();
    let mu = crate::dict::coherence(&d).unwrap();
    assert!((mu - h).abs() < 1e-15);
    let z = CoefVector::from_sparse(3, &[0], &[1.0]).unwrap();
    let t = lineality_decompose(&d, &z, Some(1e-9)).unwrap().tan_sq_alpha().unwrap();
    let exact = (5.0 * std::f64::consts::PI / 16.0).tan().powi(2);
    assert!((t - exact).abs() < 1e-9, "{t} vs {exact}");
    let formula = (1.0 - mu) / ((1.0 - 2.0 * mu) * (1.0 - 2.0 * mu));
    assert!(t > formula + 0.5);
    assert!(coherence_circumangle_bound(1, mu).is_err());
}
