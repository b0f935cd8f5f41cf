//! Independence statistics for paired samples.
//!
//! For a paired sample `(x_i, y_i)` the statistic is the V-statistic
//! `T = Σ w_ik w_jl 𝕀((x_i, y_k), (x_j, y_l))` with
//! `w_ik = (1/n)·[i = k] − 1/n²`, the empirical `π̂ − π̂₁ ⊗ π̂₂`.
//! It is nonnegative for every PDI kernel and zero for the product measure.
//!
//! Three evaluation paths agree to rounding:
//!
//! - [`statistic_direct`] sums all `n⁴` kernel values;
//! - [`statistic_kronecker_fast`] uses `(1/n²)⟨HGγH, HGςH⟩_F` in `O(n²)`;
//! - [`statistic_decomposed`] splits mixture kernels into Kronecker terms.
//!
//! [`permutation_test`] calibrates the statistic by permuting the `y` rows.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::vector_quadratic_form;
use crate::cnd::{gram_cnd, CndKernelSpec, PointSet};
use crate::error::{Error, Result};
use crate::linalg::{double_center, ensure_square, frobenius_dot, pairwise_sum, symmetric_from_fn};
use crate::pdi::{nine_term, PdiFamily, PdiKernelSpec};
use crate::special::{
    bernstein1_eval, power_levy_constant, saturate, upper_gamma_negative, Bernstein1Spec, Bernstein2Spec, Cm2Spec,
    QuadratureGrid,
};

/// Name of the permutation generator, echoed in every test result.
pub const PERMUTATION_GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), replica seed = seed + replica index";
pub const MIN_PERMUTATION_SAMPLE: usize = 4;
pub const MIN_PERMUTATIONS: usize = 19;
/// Tolerance on the total mass of two-sample weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// `n` paired observations `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    xs: PointSet,
    ys: PointSet,
}

impl PairedSample {
    pub fn new(xs: PointSet, ys: PointSet) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
        }
        if xs.len() < 2 {
            return Err(Error::SampleTooSmall { min: 2, got: xs.len() });
        }
        Ok(Self { xs, ys })
    }

    pub fn from_rows(x_rows: &[Vec<f64>], y_rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(PointSet::euclidean(x_rows)?, PointSet::euclidean(y_rows)?)
    }

    /// Scalar `x` and `y`.
    pub fn from_scalars(xs: &[f64], ys: &[f64]) -> Result<Self> {
        Self::new(PointSet::line(xs)?, PointSet::line(ys)?)
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &PointSet {
        &self.xs
    }

    pub fn ys(&self) -> &PointSet {
        &self.ys
    }

    /// Applies the same row permutation to both coordinates.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { xs: self.xs.permuted(perm), ys: self.ys.permuted(perm) }
    }

    /// Pairs `x_i` with `y_{perm[i]}`.
    pub fn with_permuted_y(&self, perm: &[usize]) -> Self {
        Self { xs: self.xs.clone(), ys: self.ys.permuted(perm) }
    }
}

/// `w[i][k] = (1/n)·[i = k] − 1/n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaWeights {
    pub w: DMatrix<f64>,
}

pub fn delta_weights(n: usize) -> Result<DeltaWeights> {
    if n == 0 {
        return Err(Error::InvalidParameter("delta weights need n ≥ 1".into()));
    }
    let nf = n as f64;
    let w = DMatrix::from_fn(n, n, |i, k| if i == k { 1.0 / nf - 1.0 / (nf * nf) } else { -1.0 / (nf * nf) });
    Ok(DeltaWeights { w })
}

/// Kernel values on the `n × n` grid `(x_i, y_k)` built from a sample.
struct SampleKernel<'a> {
    spec: &'a PdiKernelSpec,
    source: Source<'a>,
    n: usize,
}

enum Source<'a> {
    Factors { gx: DMatrix<f64>, gy: DMatrix<f64> },
    Grid(&'a DMatrix<f64>),
}

impl<'a> SampleKernel<'a> {
    fn new(spec: &'a PdiKernelSpec, sample: &PairedSample) -> Result<Self> {
        spec.validate()?;
        let n = sample.n();
        let source = match &spec.family {
            PdiFamily::RawGrid { matrix, n: rn, m: rm } => {
                if (*rn, *rm) != (n, n) {
                    return Err(Error::Shape(format!("raw grid is {rn}x{rm}, sample needs {n}x{n}")));
                }
                Source::Grid(matrix)
            }
            _ => {
                let (gs, vs) = spec.factors().expect("symbolic family");
                Source::Factors { gx: gram_cnd(gs, &sample.xs)?, gy: gram_cnd(vs, &sample.ys)? }
            }
        };
        Ok(Self { spec, source, n })
    }

    fn raw(&self, i: usize, k: usize, j: usize, l: usize) -> Result<f64> {
        match &self.source {
            Source::Factors { gx, gy } => self.spec.combine(gx[(i, j)], gy[(k, l)]),
            Source::Grid(g) => Ok(g[(i * self.n + k, j * self.n + l)]),
        }
    }

    fn value(&self, i: usize, k: usize, j: usize, l: usize) -> Result<f64> {
        if self.spec.centered {
            nine_term(|a, b, c, d| self.raw(a, b, c, d), i, k, j, l)
        } else {
            self.raw(i, k, j, l)
        }
    }
}

/// `Σ_{i,k,j,l} w[i][k] w[j][l] 𝕀((x_i,y_k),(x_j,y_l))` by direct summation.
pub fn statistic_direct(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<f64> {
    let kernel = SampleKernel::new(spec, sample)?;
    let n = sample.n();
    let w = delta_weights(n)?.w;
    let mut outer = Vec::with_capacity(n * n);
    let mut inner = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            inner.clear();
            for j in 0..n {
                for l in 0..n {
                    inner.push(w[(j, l)] * kernel.value(i, k, j, l)?);
                }
            }
            outer.push(w[(i, k)] * pairwise_sum(&inner));
        }
    }
    Ok(pairwise_sum(&outer))
}

/// `(1/n²)⟨HAH, HBH⟩_F` for factor Grams `A` on `x` and `B` on `y`.
pub fn kronecker_statistic_from_grams(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let n = ensure_square(a, "x Gram")?;
    let nb = ensure_square(b, "y Gram")?;
    if n != nb {
        return Err(Error::DimensionMismatch { expected: n, got: nb });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(frobenius_dot(&double_center(a), &double_center(b)) / (nf * nf))
}

/// The statistic of `γ ⊗ ς` in `O(n²)`.
pub fn statistic_kronecker_fast(x: &CndKernelSpec, y: &CndKernelSpec, sample: &PairedSample) -> Result<f64> {
    kronecker_statistic_from_grams(&gram_cnd(x, &sample.xs)?, &gram_cnd(y, &sample.ys)?)
}

/// Elementwise map applied to a factor Gram.
#[derive(Debug, Clone, PartialEq)]
enum Factor {
    Identity,
    /// `(1 − e^{−rt})/r`
    Saturate(f64),
    /// `e^{−rt}`
    Exp(f64),
    Bernstein1(Bernstein1Spec),
}

impl Factor {
    fn apply(&self, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(match self {
            Factor::Identity => g.clone(),
            Factor::Saturate(r) => g.map(|t| saturate(*r, t)),
            Factor::Exp(r) => g.map(|t| (-r * t).exp()),
            Factor::Bernstein1(spec) => {
                let mut out = g.clone();
                for v in out.iter_mut() {
                    *v = bernstein1_eval(spec, *v)?;
                }
                out
            }
        })
    }
}

type KroneckerTerm = (f64, Factor, Factor);

fn bernstein_terms(g: &Bernstein2Spec, out: &mut Vec<KroneckerTerm>) {
    match g {
        Bernstein2Spec::ProductOfBernstein1(a, b) => {
            out.push((1.0, Factor::Bernstein1(a.clone()), Factor::Bernstein1(b.clone())))
        }
        Bernstein2Spec::Mixture2(atoms) => {
            for &(r1, r2, w) in atoms {
                out.push((w * (1.0 + r1) * (1.0 + r2), Factor::Saturate(r1), Factor::Saturate(r2)));
            }
        }
        // one-variable parts are annihilated by the weights
        Bernstein2Spec::BoundaryAugmented { core, .. } => bernstein_terms(core, out),
    }
}

/// Kronecker terms whose statistics add up to the statistic of `spec`.
/// Terms depending on a single variable, and constants, are dropped.
fn kronecker_terms(spec: &PdiKernelSpec) -> Result<Vec<KroneckerTerm>> {
    let mut out = Vec::new();
    match &spec.family {
        PdiFamily::BernsteinCompose { g, .. } => bernstein_terms(g, &mut out),
        PdiFamily::Cm2Compose { psi, .. } => match psi {
            Cm2Spec::Quadratic { a2, .. } => {
                if *a2 != 0.0 {
                    out.push((2.0 * a2, Factor::Identity, Factor::Identity));
                }
            }
            Cm2Spec::Mixture { measure, a2, .. } => {
                if *a2 != 0.0 {
                    out.push((2.0 * a2, Factor::Identity, Factor::Identity));
                }
                for &(r, w) in measure.atoms() {
                    out.push((w * (1.0 + r * r) / (r * r), Factor::Exp(r), Factor::Exp(r)));
                }
            }
            other => return Err(Error::Unsupported(format!("{} has no finite mixture form", other.label()))),
        },
        PdiFamily::Kronecker { .. } => {
            return Err(Error::Unsupported("Kronecker kernels use the Kronecker path".into()));
        }
        PdiFamily::RawGrid { .. } => return Err(Error::Unsupported("raw grids have no factor kernels".into())),
    }
    Ok(out)
}

/// Centered factor Grams `(coefficient, HAH, HBH)` for each Kronecker term.
fn centered_terms(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<Vec<(f64, DMatrix<f64>, DMatrix<f64>)>> {
    let (gs, vs) = spec.factors().ok_or_else(|| Error::Unsupported("raw grids have no factor kernels".into()))?;
    let gx = gram_cnd(gs, &sample.xs)?;
    let gy = gram_cnd(vs, &sample.ys)?;
    let terms = match &spec.family {
        PdiFamily::Kronecker { .. } => vec![(1.0, Factor::Identity, Factor::Identity)],
        _ => kronecker_terms(spec)?,
    };
    terms
        .into_iter()
        .map(|(c, fx, fy)| Ok((c, double_center(&fx.apply(&gx)?), double_center(&fy.apply(&gy)?))))
        .collect()
}

/// The statistic of a Bernstein or CM₂ mixture kernel as a weighted sum of
/// Kronecker statistics, one per atom.
pub fn statistic_decomposed(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<f64> {
    spec.validate()?;
    if matches!(spec.family, PdiFamily::Kronecker { .. }) {
        return Err(Error::Unsupported("Kronecker kernels use the Kronecker path".into()));
    }
    let terms = centered_terms(spec, sample)?;
    let nf = sample.n() as f64;
    let parts: Vec<f64> = terms.iter().map(|(c, a, b)| c * frobenius_dot(a, b) / (nf * nf)).collect();
    Ok(pairwise_sum(&parts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticPath {
    Decomposed,
    Kronecker,
    Direct,
}

/// Fastest path that applies to `spec`.
pub fn select_path(spec: &PdiKernelSpec) -> StatisticPath {
    match &spec.family {
        PdiFamily::Kronecker { .. } => StatisticPath::Kronecker,
        PdiFamily::RawGrid { .. } => StatisticPath::Direct,
        _ if kronecker_terms(spec).is_ok() => StatisticPath::Decomposed,
        _ => StatisticPath::Direct,
    }
}

/// The statistic by the fastest applicable path.
pub fn statistic(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<(f64, StatisticPath)> {
    let path = select_path(spec);
    let value = match (path, &spec.family) {
        (StatisticPath::Kronecker, PdiFamily::Kronecker { x, y }) => {
            spec.validate()?;
            statistic_kronecker_fast(x, y, sample)?
        }
        (StatisticPath::Decomposed, _) => statistic_decomposed(spec, sample)?,
        _ => statistic_direct(spec, sample)?,
    };
    Ok((value, path))
}

/// Builds the grid Gram `G[idx(i,k), idx(j,l)] = 𝕀((x_i,y_k),(x_j,y_l))`
/// over all `n²` combinations of sample coordinates.
pub fn sample_grid_gram(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<DMatrix<f64>> {
    let kernel = SampleKernel::new(spec, sample)?;
    let n = sample.n();
    symmetric_from_fn(n * n, |a, b| kernel.value(a / n, a % n, b / n, b % n))
}

/// `(H ⊗ H) G (H ⊗ H)` for a Gram over an `n × n` grid.
fn tensor_center(g: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let size = n * n;
    let mut half = DMatrix::zeros(size, size);
    for c in 0..size {
        let block = DMatrix::from_fn(n, n, |i, k| g[(i * n + k, c)]);
        let centered = double_center(&block);
        for i in 0..n {
            for k in 0..n {
                half[(i * n + k, c)] = centered[(i, k)];
            }
        }
    }
    let mut out = DMatrix::zeros(size, size);
    for r in 0..size {
        let block = DMatrix::from_fn(n, n, |j, l| half[(r, j * n + l)]);
        let centered = double_center(&block);
        for j in 0..n {
            for l in 0..n {
                out[(r, j * n + l)] = centered[(j, l)];
            }
        }
    }
    // exact symmetry
    let t = out.transpose();
    (out + t) * 0.5
}

/// The doubly-centered kernel `K^𝕀_{P,Q}` on the sample grid, with `P̂` and
/// `Q̂` the empirical marginals:
/// `K((x,y),(x′,y′)) = ∫∫ 𝕀 d[(δ_x − P)⊗(δ_y − Q)] d[(δ_x′ − P)⊗(δ_y′ − Q)]`.
/// Positive semidefinite for every PDI kernel.
pub fn centered_kernel_pq_matrix(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<DMatrix<f64>> {
    let g = sample_grid_gram(spec, sample)?;
    Ok(tensor_center(&g, sample.n()))
}

/// One entry `K^𝕀_{P,Q}((x_i, y_k), (x_j, y_l))`.
pub fn centered_kernel_pq(
    spec: &PdiKernelSpec,
    sample: &PairedSample,
    (i, k): (usize, usize),
    (j, l): (usize, usize),
) -> Result<f64> {
    let n = sample.n();
    for idx in [i, k, j, l] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    // (h_i ⊗ h_k)ᵀ G (h_j ⊗ h_l) with h_i = e_i − 1/n
    let kernel = SampleKernel::new(spec, sample)?;
    let nf = n as f64;
    let h = |a: usize, b: usize| if a == b { 1.0 - 1.0 / nf } else { -1.0 / nf };
    let mut terms = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let left = h(i, a) * h(k, b);
            let mut inner = Vec::with_capacity(n * n);
            for c in 0..n {
                for d in 0..n {
                    inner.push(h(j, c) * h(l, d) * kernel.value(a, b, c, d)?);
                }
            }
            terms.push(left * pairwise_sum(&inner));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `(1/n²) Σ_{i,j} K^𝕀_{P,Q}((x_i,y_i),(x_j,y_j))`.
pub fn dcov_statistic(spec: &PdiKernelSpec, sample: &PairedSample) -> Result<f64> {
    let k = centered_kernel_pq_matrix(spec, sample)?;
    let n = sample.n();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            terms.push(k[(i * n + i, j * n + j)]);
        }
    }
    let nf = n as f64;
    Ok(pairwise_sum(&terms) / (nf * nf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_permutations: usize,
    pub seed: u64,
    pub kernel: String,
    pub path: StatisticPath,
    pub generator: String,
    pub elapsed_ms: u64,
}

/// The permutation applied in replica `index`.
pub fn replica_permutation(seed: u64, index: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Statistic of the sample with `y` rows permuted, precomputed per path.
enum Permutable {
    Terms(Vec<(f64, DMatrix<f64>, DMatrix<f64>)>),
    Direct { sums: DMatrix<f64>, total: f64 },
}

impl Permutable {
    fn new(
        spec: &PdiKernelSpec,
        sample: &PairedSample,
        path: StatisticPath,
        kernel: &SampleKernel<'_>,
    ) -> Result<Self> {
        match path {
            StatisticPath::Decomposed | StatisticPath::Kronecker => Ok(Self::Terms(centered_terms(spec, sample)?)),
            StatisticPath::Direct => {
                // A[i][k] = Σ_{j,l} 𝕀((x_i,y_k),(x_j,y_l)), shared by every permutation
                let n = sample.n();
                let rows: Vec<Vec<f64>> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let mut row = Vec::with_capacity(n);
                        let mut inner = Vec::with_capacity(n * n);
                        for k in 0..n {
                            inner.clear();
                            for j in 0..n {
                                for l in 0..n {
                                    inner.push(kernel.raw(i, k, j, l)?);
                                }
                            }
                            row.push(pairwise_sum(&inner));
                        }
                        Ok(row)
                    })
                    .collect::<Result<_>>()?;
                let flat: Vec<f64> = rows.concat();
                let total = pairwise_sum(&flat);
                Ok(Self::Direct { sums: DMatrix::from_row_slice(n, n, &flat), total })
            }
        }
    }

    /// Statistic for the pairing `(x_i, y_{σ(i)})`.
    fn eval(&self, kernel: &SampleKernel<'_>, sigma: &[usize]) -> Result<f64> {
        let n = sigma.len();
        let nf = n as f64;
        match self {
            Self::Terms(terms) => {
                let mut parts = Vec::with_capacity(terms.len());
                let mut buf = Vec::with_capacity(n * n);
                for (c, a, b) in terms {
                    buf.clear();
                    for i in 0..n {
                        for j in 0..n {
                            buf.push(a[(i, j)] * b[(sigma[i], sigma[j])]);
                        }
                    }
                    parts.push(c * pairwise_sum(&buf) / (nf * nf));
                }
                Ok(pairwise_sum(&parts))
            }
            Self::Direct { sums, total } => {
                // centering leaves the statistic unchanged, so the raw kernel suffices
                let mut diag = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        diag.push(kernel.raw(i, sigma[i], j, sigma[j])?);
                    }
                }
                let cross: Vec<f64> = (0..n).map(|i| sums[(i, sigma[i])]).collect();
                let value = pairwise_sum(&diag) - 2.0 / nf * pairwise_sum(&cross) + total / (nf * nf);
                Ok(value / (nf * nf))
            }
        }
    }
}

/// Permutation test of independence with `n_perm` seeded replicas.
///
/// The p-value is `(1 + #{T_σ ≥ T}) / (1 + n_perm)`. Replicas run in
/// parallel but each draws from its own generator, so the result does not
/// depend on scheduling.
pub fn permutation_test(
    spec: &PdiKernelSpec,
    sample: &PairedSample,
    n_perm: usize,
    seed: u64,
) -> Result<IndependenceTestResult> {
    let start = Instant::now();
    let n = sample.n();
    if n < MIN_PERMUTATION_SAMPLE {
        return Err(Error::SampleTooSmall { min: MIN_PERMUTATION_SAMPLE, got: n });
    }
    if n_perm < MIN_PERMUTATIONS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_PERMUTATIONS} permutations, got {n_perm}")));
    }
    let kernel = SampleKernel::new(spec, sample)?;
    let path = select_path(spec);
    let pre = Permutable::new(spec, sample, path, &kernel)?;
    let identity: Vec<usize> = (0..n).collect();
    let observed = pre.eval(&kernel, &identity)?;
    let replicas: Vec<f64> = (0..n_perm)
        .into_par_iter()
        .map(|r| pre.eval(&kernel, &replica_permutation(seed, r, n)))
        .collect::<Result<_>>()?;
    let exceed = replicas.iter().filter(|&&t| t >= observed).count();
    Ok(IndependenceTestResult {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (1 + n_perm) as f64,
        n_permutations: n_perm,
        seed,
        kernel: spec.label(),
        path,
        generator: PERMUTATION_GENERATOR.to_string(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn check_weights(k: &DMatrix<f64>, w: &[f64]) -> Result<()> {
    let n = ensure_square(k, "kernel matrix")?;
    if n != w.len() {
        return Err(Error::DimensionMismatch { expected: n, got: w.len() });
    }
    let sum = pairwise_sum(w);
    let scale = w.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if !(sum.abs() <= WEIGHT_SUM_TOL * scale) {
        return Err(Error::WeightSum { sum });
    }
    Ok(())
}

/// `(1/n₁, …, 1/n₁, −1/n₂, …, −1/n₂)`: the difference of two empirical measures.
pub fn two_sample_weights(n1: usize, n2: usize) -> Result<Vec<f64>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("both samples must be nonempty".into()));
    }
    let mut w = vec![1.0 / n1 as f64; n1];
    w.extend(std::iter::repeat_n(-1.0 / n2 as f64, n2));
    Ok(w)
}

/// Squared MMD `wᵀKw` for a PD Gram over the pooled sample.
pub fn mmd_squared(k: &DMatrix<f64>, w: &[f64]) -> Result<f64> {
    check_weights(k, w)?;
    vector_quadratic_form(k, w)
}

/// Squared energy distance `−wᵀΓw` for a CND Gram over the pooled sample.
pub fn energy_distance_squared(gamma: &DMatrix<f64>, w: &[f64]) -> Result<f64> {
    check_weights(gamma, w)?;
    Ok(-vector_quadratic_form(gamma, w)?)
}

/// Both sides of the introductory identity for
/// `𝕀 = (‖x − x′‖² + ‖y − y′‖²)^{3/2}`:
/// the statistic itself, and `(3/(4√π)) ∫₀^∞ T_r r^{−5/2} dr` where `T_r` is
/// the statistic of the Gaussian kernel `e^{−r(‖x − x′‖² + ‖y − y′‖²)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntroIdentity {
    pub direct: f64,
    pub integral: f64,
    pub relative_residual: f64,
}

pub fn intro_identity(sample: &PairedSample, grid: &QuadratureGrid) -> Result<IntroIdentity> {
    grid.validate()?;
    let sq = CndKernelSpec::squared_euclidean();
    let spec = PdiKernelSpec::cm2(Cm2Spec::PowerA(1.5), sq.clone(), sq.clone());
    let direct = statistic_direct(&spec, sample)?;

    let gx = gram_cnd(&sq, &sample.xs)?;
    let gy = gram_cnd(&sq, &sample.ys)?;
    let gaussian = |r: f64| -> Result<f64> {
        kronecker_statistic_from_grams(&gx.map(|t| (-r * t).exp()), &gy.map(|t| (-r * t).exp()))
    };
    let mut failure = None;
    let middle = grid.integrate(|r| match gaussian(r) {
        Ok(v) => v * r.powf(-2.5),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    // below r_min, T_r = r²·T(γ ⊗ ς) + O(r³)
    let lower = 2.0 * grid.r_min.sqrt() * kronecker_statistic_from_grams(&gx, &gy)?;
    // above r_max, integrate every pair exactly: ∫_R^∞ e^{−rd} r^{−5/2} dr = d^{3/2} Γ(−3/2, Rd)
    let n = sample.n();
    let w = delta_weights(n)?.w;
    let big_r = grid.r_max;
    let tail = |d: f64| {
        if d == 0.0 {
            2.0 / 3.0 * big_r.powf(-1.5)
        } else {
            d.powf(1.5) * upper_gamma_negative(1.5, big_r * d)
        }
    };
    let mut upper_terms = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    upper_terms.push(w[(i, k)] * w[(j, l)] * tail(gx[(i, j)] + gy[(k, l)]));
                }
            }
        }
    }
    let upper = pairwise_sum(&upper_terms);
    let integral = power_levy_constant(1.5) * (lower + middle + upper);
    let relative_residual = (direct - integral).abs() / direct.abs().max(f64::MIN_POSITIVE);
    Ok(IntroIdentity { direct, integral, relative_residual })
}
