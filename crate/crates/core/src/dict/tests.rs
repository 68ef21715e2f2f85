use super::*;
use proptest::prelude::*;

fn brute_coherence(m: &DMatrix<f64>) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..m.ncols() {
        for j in 0..m.ncols() {
            if i == j {
                continue;
            }
            let (mut dot, mut ni, mut nj) = (0.0, 0.0, 0.0);
            for r in 0..m.nrows() {
                dot += m[(r, i)] * m[(r, j)];
                ni += m[(r, i)] * m[(r, i)];
                nj += m[(r, j)] * m[(r, j)];
            }
            best = best.max(dot.abs() / (ni.sqrt() * nj.sqrt()));
        }
    }
    best
}

#[test]
fn identity_shapes() {
    let d = make_identity(3).unwrap();
    assert_eq!(d.matrix(), &DMatrix::<f64>::identity(3, 3));
    assert_eq!(d.atom_norms(), &[1.0, 1.0, 1.0]);
    assert_eq!(make_identity(1).unwrap().matrix()[(0, 0)], 1.0);
    let big = make_identity(256).unwrap();
    assert_eq!((big.n(), big.d()), (256, 256));
    assert!(big.has_unit_atoms());
    assert!(make_identity(0).is_err());
}

#[test]
fn gaussian_is_deterministic_and_unnormalized() {
    let a = make_gaussian(256, 512, 0).unwrap();
    assert_eq!((a.n(), a.d()), (256, 512));
    let b = make_gaussian(256, 512, 0).unwrap();
    assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
    assert_ne!(a.matrix(), make_gaussian(256, 512, 1).unwrap().matrix());

    let g = make_gaussian(64, 128, 5).unwrap();
    let mean = g.atom_norms().iter().sum::<f64>() / 128.0;
    assert!((6.5..=9.5).contains(&mean), "mean column norm {mean}");
    assert!(!g.has_unit_atoms());
}

#[test]
fn haar_dimensions_and_norms() {
    let h = make_haar_redundant(256, 3).unwrap();
    assert_eq!((h.n(), h.d()), (256, 1024));
    assert!(h.has_unit_atoms());

    let h2 = make_haar_redundant(2, 1).unwrap();
    assert_eq!(h2.d(), 4);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..4 {
        let col = h2.atom(j);
        let is_low = (col[0] - r).abs() < 1e-15 && (col[1] - r).abs() < 1e-15;
        let is_high = (col[0].abs() - r).abs() < 1e-15 && (col[0] + col[1]).abs() < 1e-15;
        assert!(is_low || is_high, "column {j} = {col:?}");
    }

    for (n, levels) in [(8, 2), (16, 4), (64, 3)] {
        let h = make_haar_redundant(n, levels).unwrap();
        assert_eq!(h.d(), n * (levels + 1));
        assert!(h.has_unit_atoms());
        let frame = h.matrix() * h.matrix().transpose();
        for i in 1..n {
            assert!((frame[(i, i)] - frame[(0, 0)]).abs() < 1e-12);
        }
    }
}

#[test]
fn haar_rejects_bad_arguments() {
    assert!(make_haar_redundant(12, 1).is_err());
    assert!(make_haar_redundant(8, 0).is_err());
    assert!(make_haar_redundant(8, 4).is_err());
    assert!(make_haar_redundant(8, 3).is_ok());
}

#[test]
fn conv_pair_matches_displayed_matrix() {
    #[rustfmt::skip]
    let expected = DMatrix::from_row_slice(4, 8, &[
        1.0, 1.0, 0.0, 0.0,  1.0, -1.0,  0.0,  0.0,
        0.0, 1.0, 1.0, 0.0,  0.0,  1.0, -1.0,  0.0,
        0.0, 0.0, 1.0, 1.0,  0.0,  0.0,  1.0, -1.0,
        1.0, 0.0, 0.0, 1.0, -1.0,  0.0,  0.0,  1.0,
    ]);
    let d = make_conv_pair(4).unwrap();
    assert_eq!(d.matrix(), &expected);
    let mu = coherence(&d).unwrap();
    assert!((mu - brute_coherence(&expected)).abs() < 1e-15);
    for n in [3, 7, 20] {
        let d = make_conv_pair(n).unwrap();
        assert!(d.atom_norms().iter().all(|&v| (v - 2f64.sqrt()).abs() < 1e-15));
    }
    assert!(make_conv_pair(2).is_err());
}

#[test]
fn superres_is_circulant() {
    let d = make_superres(256, SUPERRES_SIGMA).unwrap();
    assert_eq!((d.n(), d.d()), (256, 256));
    for j in 1..256 {
        for i in 0..256 {
            assert_eq!(d.matrix()[(i, j)], d.matrix()[((i + 256 - j) % 256, 0)]);
        }
    }
    let delta = make_superres(16, 1e-6).unwrap();
    assert!((delta.matrix() - DMatrix::<f64>::identity(16, 16)).amax() < 1e-12);
    assert!(make_superres(8, 0.0).is_err());
}

#[test]
fn tv_pinv_moore_penrose_identities() {
    let d3 = make_tv_pinv(3).unwrap();
    let grad = forward_differences(3);
    assert_eq!(grad, DMatrix::from_row_slice(2, 3, &[-1.0, 1.0, 0.0, 0.0, -1.0, 1.0]));
    assert!((&grad * d3.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-10);

    for n in [3, 10, 57] {
        let pinv = make_tv_pinv(n).unwrap();
        let grad = forward_differences(n);
        let p = pinv.matrix();
        assert_eq!((p.nrows(), p.ncols()), (n, n - 1));
        assert!((&grad * p * &grad - &grad).amax() < 1e-8);
        assert!((p * &grad * p - p).amax() < 1e-8);
        // symmetric projectors
        let gp = &grad * p;
        let pg = p * &grad;
        assert!((gp.transpose() - &gp).amax() < 1e-10);
        assert!((pg.transpose() - &pg).amax() < 1e-10);
        for j in 0..n - 1 {
            assert!(p.column(j).sum().abs() < 1e-10);
        }
    }
    let big = make_tv_pinv(500).unwrap();
    assert_eq!((big.n(), big.d()), (500, 499));
}

#[test]
fn coherence_edge_cases() {
    assert_eq!(coherence(&make_identity(5).unwrap()).unwrap(), 0.0);
    let dup = Dictionary::new(DMatrix::from_column_slice(2, 2, &[1.0, 2.0, 1.0, 2.0]), "dup").unwrap();
    assert!((coherence(&dup).unwrap() - 1.0).abs() < 1e-15);
    let conv = make_conv_pair(8).unwrap();
    assert!((coherence(&conv).unwrap() - brute_coherence(conv.matrix())).abs() < 1e-14);
    let zero = Dictionary::new(DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), "z").unwrap();
    assert!(matches!(coherence(&zero), Err(Error::Domain(_))));
    assert!(coherence(&make_identity(1).unwrap()).is_err());
}

#[test]
fn omp_identity_recovers_exactly() {
    let d = make_identity(10).unwrap();
    let z = CoefVector::from_sparse(10, &[1, 4, 7], &[2.0, -1.0, 0.5]).unwrap();
    let x = d.synthesize(&z);
    let got = omp(&d, &x, 3, 0.0).unwrap();
    assert_eq!(got.support(), z.support());
    assert!((got.entries() - z.entries()).amax() < 1e-14);
}

#[test]
fn omp_single_atom_match() {
    let h = make_haar_redundant(16, 2).unwrap();
    assert!(coherence(&h).unwrap() < 1.0);
    let x = SignalVector::new(h.atom(5));
    let got = omp(&h, &x, 1, 0.0).unwrap();
    assert_eq!(got.support(), &[5]);
}

#[test]
fn omp_residuals_decrease() {
    let d = make_gaussian(8, 16, 3).unwrap().normalized().unwrap();
    let z = CoefVector::from_sparse(16, &[2, 11], &[1.0, -0.7]).unwrap();
    let trace = omp_with_trace(&d, &d.synthesize(&z), 4, 1e-12).unwrap();
    assert!(trace.residual_norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(trace.coefficients.sparsity() <= 4);
    let last = *trace.residual_norms.last().unwrap();
    assert!(last <= 1e-12 || trace.coefficients.sparsity() == 4);
    assert!(omp(&d, &d.synthesize(&z), 17, 0.0).is_err());
}

#[test]
fn binary_and_csv_round_trip_exactly() {
    let d = make_gaussian(5, 7, 9).unwrap();
    let mut buf = Vec::new();
    write_binary(&d, &mut buf).unwrap();
    assert_eq!(read_binary(buf.as_slice()).unwrap(), d);
    let mut text = Vec::new();
    write_csv(&d, &mut text).unwrap();
    assert!(text.starts_with(b"n,d,label\n5,7,"));
    assert_eq!(read_csv(text.as_slice()).unwrap(), d);
    assert!(read_binary(&b"NOTADICT"[..]).is_err());
}

proptest! {
    #[test]
    fn coherence_is_scale_invariant(seed in 0u64..500, scales in prop::collection::vec(0.01f64..100.0, 6)) {
        let d = make_gaussian(4, 6, seed).unwrap();
        let mut m = d.matrix().clone();
        for (j, s) in scales.iter().enumerate() {
            m.column_mut(j).scale_mut(*s);
        }
        let scaled = Dictionary::new(m, "scaled").unwrap();
        let a = coherence(&d).unwrap();
        let b = coherence(&scaled).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip(seed in 0u64..1000, n in 1usize..5, d in 1usize..5) {
        let dict = make_gaussian(n, d, seed).unwrap().scaled(1e-3).unwrap();
        let mut text = Vec::new();
        write_csv(&dict, &mut text).unwrap();
        prop_assert_eq!(read_csv(text.as_slice()).unwrap(), dict);
    }
}
