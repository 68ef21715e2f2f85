//! Synthesis dictionaries, coefficient/signal vectors, coherence and OMP.

mod io;

pub use io::{fmt_f64, read_binary, read_csv, write_binary, write_csv};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, spectral_norm};

/// Tolerance for declaring an atom unit-norm.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Default width of the super-resolution Gaussian kernel, in samples.
pub const SUPERRES_SIGMA: f64 = 10.0;

/// An `n × d` synthesis matrix whose columns are the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    matrix: DMatrix<f64>,
    label: String,
    atom_norms: Vec<f64>,
}

impl Dictionary {
    pub fn new(matrix: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::Construction("dictionary must have n >= 1 and d >= 1".into()));
        }
        if let Some(pos) = matrix.iter().position(|v| !v.is_finite()) {
            return Err(Error::Construction(format!(
                "non-finite entry in column {}",
                pos / matrix.nrows()
            )));
        }
        let atom_norms = (0..matrix.ncols()).map(|j| matrix.column(j).norm()).collect();
        Ok(Dictionary {
            matrix,
            label: label.into(),
            atom_norms,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atom_norms(&self) -> &[f64] {
        &self.atom_norms
    }

    pub fn atom(&self, i: usize) -> DVector<f64> {
        self.matrix.column(i).into_owned()
    }

    pub fn has_unit_atoms(&self) -> bool {
        self.atom_norms.iter().all(|&v| (v - 1.0).abs() <= UNIT_NORM_TOL)
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// Copy with every column rescaled to unit Euclidean norm.
    pub fn normalized(&self) -> Result<Dictionary> {
        if let Some(j) = self.atom_norms.iter().position(|&v| v == 0.0) {
            return Err(Error::Domain(format!("cannot normalize zero atom {j}")));
        }
        let mut m = self.matrix.clone();
        for (j, &norm) in self.atom_norms.iter().enumerate() {
            m.column_mut(j).scale_mut(1.0 / norm);
        }
        Dictionary::new(m, format!("{}-normalized", self.label))
    }

    /// Copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Dictionary> {
        Dictionary::new(&self.matrix * factor, format!("{}-x{}", self.label, factor))
    }

    pub fn synthesize(&self, z: &CoefVector) -> SignalVector {
        SignalVector::new(&self.matrix * z.entries())
    }
}

/// Coefficient vector in `R^d` with its cached support.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    entries: DVector<f64>,
    support: Vec<usize>,
}

impl CoefVector {
    pub fn new(entries: DVector<f64>) -> Self {
        let support = (0..entries.len()).filter(|&i| entries[i] != 0.0).collect();
        CoefVector { entries, support }
    }

    pub fn from_sparse(d: usize, indices: &[usize], values: &[f64]) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::Domain("support and values differ in length".into()));
        }
        let mut entries = DVector::zeros(d);
        for (&i, &v) in indices.iter().zip(values) {
            if i >= d {
                return Err(Error::Domain(format!("index {i} out of range for d = {d}")));
            }
            entries[i] = v;
        }
        Ok(CoefVector::new(entries))
    }

    pub fn zeros(d: usize) -> Self {
        CoefVector::new(DVector::zeros(d))
    }

    pub fn entries(&self) -> &DVector<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<f64> {
        self.entries
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    /// Copy with entries below `rtol · ‖z‖∞` set to zero.
    pub fn thresholded(&self, rtol: f64) -> CoefVector {
        let cut = rtol * self.entries.amax();
        CoefVector::new(self.entries.map(|v| if v.abs() <= cut { 0.0 } else { v }))
    }

    /// Random `s`-sparse vector: uniform support in `0..d`, standard normal values.
    pub fn random_sparse(rng: &mut impl Rng, d: usize, s: usize) -> Result<Self> {
        if s > d {
            return Err(Error::Domain(format!("sparsity {s} exceeds d = {d}")));
        }
        let support = crate::rng::random_subset(rng, d, s);
        let values: Vec<f64> = crate::rng::gaussian_vector(rng, s).iter().cloned().collect();
        CoefVector::from_sparse(d, &support, &values)
    }
}

/// Signal vector in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    entries: DVector<f64>,
}

impl SignalVector {
    pub fn new(entries: DVector<f64>) -> Self {
        SignalVector { entries }
    }

    pub fn entries(&self) -> &DVector<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<f64> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }
}

pub fn make_identity(n: usize) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::Construction("identity needs n >= 1".into()));
    }
    Dictionary::new(DMatrix::identity(n, n), format!("identity-{n}"))
}

/// `[Id | Id]`: every signal has a whole segment of minimal representers.
pub fn make_duplicated_identity(n: usize) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::Construction("duplicated identity needs n >= 1".into()));
    }
    let mut m = DMatrix::zeros(n, 2 * n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        m[(i, n + i)] = 1.0;
    }
    Dictionary::new(m, format!("dup-identity-{n}"))
}

/// I.i.d. standard normal entries, columns left unnormalized.
pub fn make_gaussian(n: usize, d: usize, seed: u64) -> Result<Dictionary> {
    if n == 0 || d == 0 {
        return Err(Error::Construction("gaussian dictionary needs n, d >= 1".into()));
    }
    let mut rng = crate::rng::rng_from(seed, &[0x6761_7573]);
    let m = crate::rng::gaussian_matrix(&mut rng, n, d);
    Dictionary::new(m, format!("gaussian-{n}x{d}-seed{seed}"))
}

/// Undecimated periodic Haar frame with unit-norm atoms.
///
/// Columns are ordered by block: all `n` circular shifts of the detail atom
/// at scale 1, then scale 2, ..., scale `levels`, then the `n` shifts of the
/// coarsest scaling atom. At scale `j` the detail atom is `+1` on `2^{j-1}`
/// samples followed by `-1` on `2^{j-1}` samples, divided by `2^{j/2}`.
pub fn make_haar_redundant(n: usize, levels: usize) -> Result<Dictionary> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Construction(format!("haar frame needs n a power of two >= 2, got {n}")));
    }
    let max_levels = n.trailing_zeros() as usize;
    if levels == 0 || levels > max_levels {
        return Err(Error::Construction(format!(
            "haar levels must lie in 1..={max_levels}, got {levels}"
        )));
    }
    let d = n * (levels + 1);
    let mut m = DMatrix::zeros(n, d);
    for j in 1..=levels {
        let len = 1usize << j;
        let amp = 1.0 / (len as f64).sqrt();
        let block = (j - 1) * n;
        for shift in 0..n {
            for t in 0..len {
                let v = if t < len / 2 { amp } else { -amp };
                m[((shift + t) % n, block + shift)] = v;
            }
        }
    }
    let len = 1usize << levels;
    let amp = 1.0 / (len as f64).sqrt();
    let block = levels * n;
    for shift in 0..n {
        for t in 0..len {
            m[((shift + t) % n, block + shift)] += amp;
        }
    }
    Dictionary::new(m, format!("haar-{n}-l{levels}"))
}

/// Two circulant blocks with kernels `[1, 1]` and `[1, -1]`.
///
/// Column `j < n` has ones on rows `j-1` and `j` (mod n); column `n + j` has
/// `+1` on row `j` and `-1` on row `j-1` (mod n).
pub fn make_conv_pair(n: usize) -> Result<Dictionary> {
    if n < 3 {
        return Err(Error::Construction(format!("conv pair needs n >= 3, got {n}")));
    }
    let mut m = DMatrix::zeros(n, 2 * n);
    for j in 0..n {
        let prev = (j + n - 1) % n;
        m[(prev, j)] = 1.0;
        m[(j, j)] = 1.0;
        m[(j, n + j)] = 1.0;
        m[(prev, n + j)] = -1.0;
    }
    Dictionary::new(m, format!("conv-pair-{n}"))
}

/// Circulant convolution with a periodized sampled Gaussian `exp(-j²/2σ²)`.
pub fn make_superres(n: usize, sigma: f64) -> Result<Dictionary> {
    if n < 4 {
        return Err(Error::Construction(format!("superres needs n >= 4, got {n}")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Construction(format!("superres needs sigma > 0, got {sigma}")));
    }
    let wraps = (10.0 * sigma / n as f64).ceil() as i64 + 1;
    let kernel: Vec<f64> = (0..n as i64)
        .map(|i| {
            (-wraps..=wraps)
                .map(|k| {
                    let off = (i - k * n as i64) as f64;
                    (-off * off / (2.0 * sigma * sigma)).exp()
                })
                .sum()
        })
        .collect();
    let m = DMatrix::from_fn(n, n, |i, j| kernel[(i + n - j) % n]);
    Dictionary::new(m, format!("superres-{n}-sigma{sigma}"))
}

/// Forward differences `(∇x)_i = x_{i+1} - x_i`, shape `(n-1) × n`.
pub fn forward_differences(n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n - 1, n);
    for i in 0..n - 1 {
        g[(i, i)] = -1.0;
        g[(i, i + 1)] = 1.0;
    }
    g
}

/// Tolerance on the Moore–Penrose residual `‖∇∇†∇ − ∇‖_max`.
pub const PINV_TOL: f64 = 1e-8;

/// Moore–Penrose inverse of the forward-difference operator as an
/// `n × (n-1)` dictionary.
///
/// Uses `∇† = ∇ᵀ (∇∇ᵀ)⁻¹` with the closed-form inverse of the tridiagonal
/// `(2, -1)` matrix, then checks `∇∇†∇ = ∇`.
pub fn make_tv_pinv(n: usize) -> Result<Dictionary> {
    if n < 3 {
        return Err(Error::Construction(format!("tv dictionary needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    // (∇∇ᵀ)⁻¹ entries, 0-indexed over 0..n-1
    let kinv = |a: usize, b: usize| ((a.min(b) + 1) as f64) * ((n - a.max(b) - 1) as f64) / nf;
    let cols = n - 1;
    let pinv = DMatrix::from_fn(n, cols, |i, b| {
        let left = if i >= 1 { kinv(i - 1, b) } else { 0.0 };
        let right = if i < cols { kinv(i, b) } else { 0.0 };
        left - right
    });
    // E = ∇∇† − I computed via row differences, then (E∇) in O(n²)
    let e: DMatrix<f64> = DMatrix::from_fn(cols, cols, |a, b| {
        pinv[(a + 1, b)] - pinv[(a, b)] - if a == b { 1.0 } else { 0.0 }
    });
    let mut residual: f64 = 0.0;
    for a in 0..cols {
        for k in 0..n {
            let plus = if k >= 1 { e[(a, k - 1)] } else { 0.0 };
            let minus = if k < cols { e[(a, k)] } else { 0.0 };
            residual = residual.max((plus - minus).abs());
        }
    }
    if residual > PINV_TOL {
        return Err(Error::Numerical(format!(
            "pseudoinverse residual {residual:.3e} exceeds {PINV_TOL:.1e}"
        )));
    }
    Dictionary::new(pinv, format!("tv-pinv-{n}"))
}

/// Mutual coherence `max_{i≠j} |⟨d_i, d_j⟩| / (‖d_i‖‖d_j‖)`.
pub fn coherence(dict: &Dictionary) -> Result<f64> {
    if dict.d() < 2 {
        return Err(Error::Domain("coherence needs at least two atoms".into()));
    }
    if let Some(j) = dict.atom_norms().iter().position(|&v| v == 0.0) {
        return Err(Error::Domain(format!("atom {j} is zero")));
    }
    let mut unit = dict.matrix().clone();
    for (j, &norm) in dict.atom_norms().iter().enumerate() {
        unit.column_mut(j).scale_mut(1.0 / norm);
    }
    let gram = unit.transpose() * &unit;
    let mut mu: f64 = 0.0;
    for j in 0..gram.ncols() {
        for i in 0..j {
            mu = mu.max(gram[(i, j)].abs());
        }
    }
    Ok(mu.min(1.0))
}

/// Orthogonal matching pursuit result with its residual history.
#[derive(Debug, Clone)]
pub struct OmpTrace {
    pub coefficients: CoefVector,
    /// Residual norm before the first selection and after every refit.
    pub residual_norms: Vec<f64>,
}

/// Greedy sparse approximation of `x` with at most `s_max` atoms.
pub fn omp(dict: &Dictionary, x: &SignalVector, s_max: usize, tol: f64) -> Result<CoefVector> {
    omp_with_trace(dict, x, s_max, tol).map(|t| t.coefficients)
}

pub fn omp_with_trace(
    dict: &Dictionary,
    x: &SignalVector,
    s_max: usize,
    tol: f64,
) -> Result<OmpTrace> {
    let d = dict.d();
    if s_max > d {
        return Err(Error::Domain(format!("s_max = {s_max} exceeds d = {d}")));
    }
    if x.len() != dict.n() {
        return Err(Error::Domain("signal length does not match dictionary".into()));
    }
    let target = x.entries();
    let mut active: Vec<usize> = Vec::new();
    let mut coef = DVector::zeros(0);
    let mut residual = target.clone();
    let mut history = vec![residual.norm()];
    while active.len() < s_max && residual.norm() > tol {
        let corr = dict.matrix().transpose() * &residual;
        let mut best = None;
        let mut best_val = 0.0;
        for j in 0..d {
            if active.contains(&j) || dict.atom_norms()[j] == 0.0 {
                continue;
            }
            let c = corr[j].abs() / dict.atom_norms()[j];
            if c > best_val {
                best_val = c;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        active.push(j);
        let sub = dict.matrix().select_columns(active.iter());
        coef = lstsq(&sub, target).0;
        residual = target - &sub * &coef;
        history.push(residual.norm());
    }
    let mut entries = DVector::zeros(d);
    for (k, &j) in active.iter().enumerate() {
        entries[j] = coef[k];
    }
    Ok(OmpTrace {
        coefficients: CoefVector::new(entries),
        residual_norms: history,
    })
}

#[cfg(test)]
mod tests;
