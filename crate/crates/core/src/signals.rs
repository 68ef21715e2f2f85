//! Coefficient and signal recipes used by the experiments.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dict::{forward_differences, CoefVector, SignalVector};
use crate::error::{Error, Result};

/// `s` standard normal coefficients on a uniformly random support in `0..d`.
pub fn random_support(rng: &mut impl Rng, d: usize, s: usize) -> Result<CoefVector> {
    CoefVector::random_sparse(rng, d, s)
}

/// Two contiguous runs of normal coefficients (lengths `⌈s/2⌉` and `⌊s/2⌋`)
/// inside the coefficient block `block` of a dictionary made of blocks of
/// `n` columns. The runs are separated by at least one zero.
pub fn two_blocks(
    rng: &mut impl Rng,
    n: usize,
    blocks: usize,
    block: usize,
    s: usize,
) -> Result<CoefVector> {
    if block >= blocks {
        return Err(Error::Domain(format!("block {block} out of range 0..{blocks}")));
    }
    let first = s.div_ceil(2);
    let second = s - first;
    if s == 0 || first + second + 1 > n {
        return Err(Error::Domain(format!("cannot fit {s} coefficients into a block of {n}")));
    }
    // split the slack of the block into three random gaps
    let slack = n - s - usize::from(second > 0);
    let a = rng.random_range(0..=slack);
    let b = rng.random_range(0..=slack - a);
    let start1 = a;
    let start2 = start1 + first + usize::from(second > 0) + b;
    let base = block * n;
    let mut idx: Vec<usize> = (start1..start1 + first).map(|i| base + i).collect();
    idx.extend((start2..start2 + second).map(|i| base + i));
    let vals: Vec<f64> = idx.iter().map(|_| rng.sample(StandardNormal)).collect();
    CoefVector::from_sparse(blocks * n, &idx, &vals)
}

/// Neighboring spikes `+1` and `−1` at the two central positions.
pub fn opposite_spikes(n: usize) -> Result<CoefVector> {
    if n < 2 {
        return Err(Error::Domain("need n >= 2 for two spikes".into()));
    }
    CoefVector::from_sparse(n, &[n / 2 - 1, n / 2], &[1.0, -1.0])
}

/// `x = a·e_1 + b·e_n`, the convolutional-pair example signal.
pub fn endpoint_signal(n: usize, a: f64, b: f64) -> Result<SignalVector> {
    if n < 3 || !(a > b && b > 0.0) {
        return Err(Error::Domain("need n >= 3 and a > b > 0".into()));
    }
    let mut x = DVector::zeros(n);
    x[0] = a;
    x[n - 1] = b;
    Ok(SignalVector::new(x))
}

/// Piecewise constant signal with `jumps` equidistant discontinuities of
/// alternating sign and zero mean.
pub fn tv_jumps(n: usize, jumps: usize) -> Result<SignalVector> {
    if jumps == 0 || jumps + 1 > n {
        return Err(Error::Domain(format!("cannot place {jumps} jumps in {n} samples")));
    }
    let mut x = DVector::zeros(n);
    for i in 0..n {
        let piece = (i * (jumps + 1)) / n;
        x[i] = if piece.is_multiple_of(2) { 1.0 } else { -1.0 };
    }
    let mean = x.mean();
    x.add_scalar_mut(-mean);
    Ok(SignalVector::new(x))
}

/// `∇x`, the minimal representer of a zero-mean signal in `∇†`.
pub fn gradient_representer(x: &SignalVector) -> CoefVector {
    let grad = forward_differences(x.len()) * x.entries();
    CoefVector::new(grad.map(|v| if v.abs() < 1e-12 { 0.0 } else { v }))
}
