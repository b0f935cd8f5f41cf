//! Numerical certification of PD, CND and PDI properties of finite Gram
//! matrices.
//!
//! Each property is a sign condition on a quadratic form restricted to a
//! linear subspace of coefficient vectors:
//!
//! | mode | subspace | condition |
//! |------|----------|-----------|
//! | PD   | all of `ℝ^N` | `cᵀGc ≥ 0` |
//! | CND  | `Σ c_i = 0` | `cᵀGc ≤ 0` |
//! | PDI  | grids with zero row and column sums | `cᵀGc ≥ 0` |
//!
//! The certifier builds an orthonormal basis `B` of the subspace and looks at
//! the extremal eigenvalue of `BᵀGB`. [`quadratic_form`] is the brute-force
//! double sum used to cross-check every report.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ensure_symmetric;

/// Relative tolerance used when callers do not pick one.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Absolute floor on the effective tolerance, for near-zero forms.
pub const ABSOLUTE_TOLERANCE_FLOOR: f64 = 1e-10;
/// Row/column sums of a [`CoefficientGrid`] must vanish to this (relative) level.
pub const GRID_SUM_TOL: f64 = 1e-12;
/// Gram inputs must be symmetric to this relative level.
pub const SYMMETRY_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 10_000;

/// An `n × m` coefficient array whose rows and columns all sum to zero.
///
/// Flattening follows the grid convention `idx(i, k) = i·m + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    values: DMatrix<f64>,
}

impl CoefficientGrid {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let max_sum = grid_max_sum(&values);
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if max_sum > GRID_SUM_TOL * scale || max_sum.is_nan() {
            return Err(Error::ConstraintViolation { max_sum });
        }
        Ok(Self { values })
    }

    /// Grid from a flattened vector of length `n·m`.
    pub fn from_flat(n: usize, m: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, got: flat.len() });
        }
        Self::new(DMatrix::from_row_slice(n, m, flat))
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { values: DMatrix::zeros(n, m) }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let (n, m) = self.values.shape();
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            for k in 0..m {
                out.push(self.values[(i, k)]);
            }
        }
        out
    }
}

fn grid_max_sum(values: &DMatrix<f64>) -> f64 {
    let rows = values.row_iter().map(|r| r.sum().abs());
    let cols = values.column_iter().map(|c| c.sum().abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of `{v ∈ ℝⁿ : Σ v_i = 0}`, Helmert-style.
///
/// Column `k` is `(1, …, 1, −(k+1), 0, …, 0) / sqrt((k+1)(k+2))`.
pub fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let mut b = DMatrix::zeros(n, n - 1);
    for k in 0..n - 1 {
        let len = (k + 1) as f64;
        let norm = (len * (len + 1.0)).sqrt();
        for i in 0..=k {
            b[(i, k)] = 1.0 / norm;
        }
        b[(k + 1, k)] = -len / norm;
    }
    b
}

/// Orthonormal basis of flattened coefficient grids with zero row and
/// column sums: the Kronecker product of the per-factor sum-zero bases.
/// Shape `(n·m) × ((n−1)(m−1))`.
pub fn constraint_basis(n: usize, m: usize) -> DMatrix<f64> {
    if n == 0 || m == 0 {
        return DMatrix::zeros(n * m, 0);
    }
    sum_zero_basis(n).kronecker(&sum_zero_basis(m))
}

/// `Σ_{i,k,j,l} c_ik c_jl G[idx(i,k), idx(j,l)]`, summed term by term.
pub fn quadratic_form(g: &DMatrix<f64>, c: &CoefficientGrid) -> Result<f64> {
    let (n, m) = (c.n(), c.m());
    let size = n * m;
    if g.nrows() != size || g.ncols() != size {
        return Err(Error::Shape(format!("Gram is {}x{}, coefficient grid needs {size}x{size}", g.nrows(), g.ncols())));
    }
    let cv = c.values();
    let mut total = 0.0;
    for i in 0..n {
        for k in 0..m {
            let cik = cv[(i, k)];
            if cik == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..m {
                    total += cik * cv[(j, l)] * g[(i * m + k, j * m + l)];
                }
            }
        }
    }
    Ok(total)
}

/// Plain quadratic form `Σ_ij c_i c_j G_ij` for PD/CND checks.
pub fn vector_quadratic_form(g: &DMatrix<f64>, c: &[f64]) -> Result<f64> {
    if g.nrows() != c.len() || g.ncols() != c.len() {
        return Err(Error::DimensionMismatch { expected: g.nrows(), got: c.len() });
    }
    let mut total = 0.0;
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            total += ci * cj * g[(i, j)];
        }
    }
    Ok(total)
}

/// Which property to certify. PDI carries its grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Pd,
    Cnd,
    Pdi { n: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationMode {
    Pd,
    Cnd,
    Pdi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Rejected,
    StrictlyCertified,
}

impl Verdict {
    /// Certified or strictly certified.
    pub fn passes(self) -> bool {
        !matches!(self, Verdict::Rejected)
    }
}

/// Outcome of [`certify`].
///
/// `min_constrained_eigenvalue` is oriented so that larger is better in
/// every mode: for CND it is the smallest eigenvalue of `−BᵀGB`. The
/// `witness` is the flattened coefficient vector `B·v` of the extremal
/// eigenvector `v` (unit norm), so `quadratic_form(G, witness)` reproduces
/// the extremal eigenvalue with the mode's sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub mode: CertificationMode,
    pub min_constrained_eigenvalue: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub constraint_dimension: usize,
    pub witness: Vec<f64>,
}

/// Certifies `g` against `constraint`.
///
/// `tol` is relative to the largest `|eigenvalue|` of the restricted form,
/// floored at [`ABSOLUTE_TOLERANCE_FLOOR`]. With `strict`, a minimum
/// eigenvalue above the tolerance yields [`Verdict::StrictlyCertified`]
/// (strictness at this point set only).
///
/// Duplicate points only add null directions to the form, so they can cost
/// strictness but never turn a true `Certified` into a false one.
pub fn certify(g: &DMatrix<f64>, constraint: Constraint, tol: f64, strict: bool) -> Result<CertificationReport> {
    let size = ensure_symmetric(g, SYMMETRY_TOL, "Gram")?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("Gram has non-finite entries".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    let (mode, basis, sign) = match constraint {
        Constraint::Pd => (CertificationMode::Pd, None, 1.0),
        Constraint::Cnd => (CertificationMode::Cnd, Some(sum_zero_basis(size)), -1.0),
        Constraint::Pdi { n, m } => {
            if n * m != size {
                return Err(Error::Shape(format!("PDI grid {n}x{m} does not match Gram of size {size}")));
            }
            (CertificationMode::Pdi, Some(constraint_basis(n, m)), 1.0)
        }
    };

    let restricted = match &basis {
        Some(b) => b.transpose() * g * b,
        None => g.clone(),
    } * sign;
    let dim = restricted.nrows();
    if dim == 0 {
        return Ok(CertificationReport {
            mode,
            min_constrained_eigenvalue: 0.0,
            tolerance: ABSOLUTE_TOLERANCE_FLOOR,
            verdict: Verdict::Certified,
            constraint_dimension: 0,
            witness: vec![0.0; size],
        });
    }
    // Exact symmetrization guards against rounding in BᵀGB.
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(restricted, f64::EPSILON, EIGEN_MAX_ITER).ok_or(Error::EigenNonConvergence)?;
    let (mut imin, mut lmin, mut scale) = (0, f64::INFINITY, 0.0_f64);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        scale = scale.max(l.abs());
        if l < lmin {
            lmin = l;
            imin = i;
        }
    }
    let tolerance = (tol * scale).max(ABSOLUTE_TOLERANCE_FLOOR);
    let v: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
    let witness = match &basis {
        Some(b) => (b * v).iter().copied().collect(),
        None => v.iter().copied().collect(),
    };
    let verdict = if lmin < -tolerance {
        Verdict::Rejected
    } else if strict && lmin > tolerance {
        Verdict::StrictlyCertified
    } else {
        Verdict::Certified
    };
    Ok(CertificationReport {
        mode,
        min_constrained_eigenvalue: lmin,
        tolerance,
        verdict,
        constraint_dimension: dim,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_zero_basis_is_orthonormal() {
        for n in 1..7 {
            let b = sum_zero_basis(n);
            assert_eq!(b.shape(), (n, n.saturating_sub(1)));
            let gram = b.transpose() * &b;
            assert!((gram - DMatrix::identity(n - 1, n - 1)).amax() < 1e-12);
            for col in b.column_iter() {
                assert!(col.sum().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constraint_basis_examples() {
        assert_eq!(constraint_basis(1, 4).ncols(), 0);
        assert_eq!(constraint_basis(3, 1).ncols(), 0);
        let b = constraint_basis(2, 2);
        assert_eq!(b.ncols(), 1);
        let col: Vec<f64> = b.column(0).iter().copied().collect();
        let expected = [0.5, -0.5, -0.5, 0.5];
        let sign = col[0].signum();
        for (a, e) in col.iter().zip(expected) {
            assert!((a * sign - e).abs() < 1e-15);
        }
        let b = constraint_basis(3, 2);
        assert_eq!(b.shape(), (6, 2));
        assert!((b.transpose() * &b - DMatrix::identity(2, 2)).amax() < 1e-12);
        // each column is a valid coefficient grid
        for col in b.column_iter() {
            let flat: Vec<f64> = col.iter().copied().collect();
            CoefficientGrid::from_flat(3, 2, &flat).unwrap();
        }
    }

    #[test]
    fn coefficient_grid_rejects_bad_sums() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, -1.0]);
        assert!(matches!(CoefficientGrid::new(bad), Err(Error::ConstraintViolation { .. })));
        let good = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(CoefficientGrid::new(good).is_ok());
    }

    fn kron_sqeuclid_2x2() -> DMatrix<f64> {
        let xs = [0.0f64, 1.0];
        DMatrix::from_fn(4, 4, |a, b| {
            let (i, k, j, l) = (a / 2, a % 2, b / 2, b % 2);
            (xs[i] - xs[j]).powi(2) * (xs[k] - xs[l]).powi(2)
        })
    }

    #[test]
    fn quadratic_form_examples() {
        let g = kron_sqeuclid_2x2();
        assert_eq!(quadratic_form(&g, &CoefficientGrid::zeros(2, 2)).unwrap(), 0.0);
        let c = CoefficientGrid::from_flat(2, 2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(quadratic_form(&g, &c).unwrap(), 4.0);
        let constant = DMatrix::from_element(6, 6, 3.7);
        let c = CoefficientGrid::from_flat(3, 2, &[1.0, -1.0, -2.0, 2.0, 1.0, -1.0]).unwrap();
        assert!(quadratic_form(&constant, &c).unwrap().abs() < 1e-12);
        assert!(quadratic_form(&g, &c).is_err());
    }

    #[test]
    fn zero_matrix_is_certified_in_every_mode() {
        let z = DMatrix::zeros(4, 4);
        for c in [Constraint::Pd, Constraint::Cnd, Constraint::Pdi { n: 2, m: 2 }] {
            let r = certify(&z, c, DEFAULT_TOLERANCE, false).unwrap();
            assert_eq!(r.verdict, Verdict::Certified);
            assert_eq!(r.min_constrained_eigenvalue, 0.0);
        }
    }

    #[test]
    fn constraint_dimensions() {
        let g = DMatrix::identity(6, 6);
        assert_eq!(certify(&g, Constraint::Pd, 1e-8, false).unwrap().constraint_dimension, 6);
        assert_eq!(certify(&g, Constraint::Cnd, 1e-8, false).unwrap().constraint_dimension, 5);
        assert_eq!(certify(&g, Constraint::Pdi { n: 3, m: 2 }, 1e-8, false).unwrap().constraint_dimension, 2);
        assert!(certify(&g, Constraint::Pdi { n: 4, m: 2 }, 1e-8, false).is_err());
    }

    #[test]
    fn identity_is_strictly_pd_and_not_cnd() {
        let g = DMatrix::identity(3, 3);
        let r = certify(&g, Constraint::Pd, 1e-8, true).unwrap();
        assert_eq!(r.verdict, Verdict::StrictlyCertified);
        let r = certify(&g, Constraint::Cnd, 1e-8, false).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        let q = vector_quadratic_form(&g, &r.witness).unwrap();
        assert!((q + r.min_constrained_eigenvalue).abs() < 1e-12);
    }

    #[test]
    fn witness_reproduces_eigenvalue() {
        let g = kron_sqeuclid_2x2();
        let r = certify(&g, Constraint::Pdi { n: 2, m: 2 }, 1e-8, true).unwrap();
        assert_eq!(r.verdict, Verdict::StrictlyCertified);
        let c = CoefficientGrid::from_flat(2, 2, &r.witness).unwrap();
        assert!((quadratic_form(&g, &c).unwrap() - r.min_constrained_eigenvalue).abs() < 1e-12);
        assert!((r.min_constrained_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_input_is_an_error() {
        let g = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(certify(&g, Constraint::Pd, 1e-8, false), Err(Error::NotSymmetric { .. })));
    }
}
