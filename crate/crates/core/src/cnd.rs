//! Conditionally negative definite (CND) kernels.
//!
//! A symmetric kernel `γ` is CND when `Σ c_i c_j γ(x_i, x_j) ≤ 0` for every
//! coefficient vector with `Σ c_i = 0`. This module evaluates the built-in
//! families, their Gram matrices, the metric `D_γ` they induce, and the two
//! classical routes from a CND kernel to a positive definite one:
//!
//! - the base-point kernel `γ(x,w) + γ(w,y) − γ(x,y) − γ(w,w)`;
//! - the exponential transform `exp(−r γ)` for `r > 0`.
//!
//! Every built-in family can be written as `γ(x,x′) = ‖h(x) − h(x′)‖² + f(x) + f(x′)`
//! for some feature map `h` into a Hilbert space. The map `h` is never built
//! explicitly; [`induced_pd_gram`] is its Gram matrix up to a base point.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_square, ensure_symmetric, symmetric_from_fn};

/// Rows of a sphere point set must have norm `1 ± SPHERE_TOL`.
pub const SPHERE_TOL: f64 = 1e-9;
/// Precomputed matrices must be symmetric to this absolute tolerance.
pub const PRECOMPUTED_SYMMETRY_TOL: f64 = 1e-12;
/// Radicands of `D_γ²` in `[-RADICAND_TOL, 0)` are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-12;

/// Where the points of a [`PointSet`] live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    Euclidean,
    UnitSphere,
    /// Abstract points identified by their position, for precomputed kernels.
    Indexed,
}

/// A single point handed to a kernel: coordinates or an abstract index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point<'a> {
    Coords(&'a [f64]),
    Index(usize),
}

impl<'a> From<&'a [f64]> for Point<'a> {
    fn from(c: &'a [f64]) -> Self {
        Point::Coords(c)
    }
}

impl<'a, const N: usize> From<&'a [f64; N]> for Point<'a> {
    fn from(c: &'a [f64; N]) -> Self {
        Point::Coords(c.as_slice())
    }
}

impl<'a> From<&'a Vec<f64>> for Point<'a> {
    fn from(c: &'a Vec<f64>) -> Self {
        Point::Coords(c.as_slice())
    }
}

/// `n` points of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    dim: usize,
    geometry: Geometry,
}

impl PointSet {
    pub fn new(rows: &[Vec<f64>], geometry: Geometry) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("point set must contain at least one point".into()));
        }
        let dim = rows[0].len();
        let mut data = Vec::with_capacity(n * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, n, dim, geometry)
    }

    pub fn euclidean(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows, Geometry::Euclidean)
    }

    pub fn sphere(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows, Geometry::UnitSphere)
    }

    /// Scalar points `x_i ∈ ℝ`.
    pub fn line(xs: &[f64]) -> Result<Self> {
        Self::from_flat(xs.to_vec(), xs.len(), 1, Geometry::Euclidean)
    }

    /// `n` abstract points `0..n`.
    pub fn indexed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("point set must contain at least one point".into()));
        }
        Ok(Self { data: Vec::new(), n, dim: 0, geometry: Geometry::Indexed })
    }

    pub fn from_flat(data: Vec<f64>, n: usize, dim: usize, geometry: Geometry) -> Result<Self> {
        if geometry == Geometry::Indexed {
            return Self::indexed(n);
        }
        if n == 0 || dim == 0 {
            return Err(Error::Shape(format!("point set needs n ≥ 1 and d ≥ 1, got {n}x{dim}")));
        }
        if data.len() != n * dim {
            return Err(Error::DimensionMismatch { expected: n * dim, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        if geometry == Geometry::UnitSphere {
            for row in data.chunks(dim) {
                check_unit(row)?;
            }
        }
        Ok(Self { data, n, dim, geometry })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point<'_> {
        match self.geometry {
            Geometry::Indexed => Point::Index(i),
            _ => Point::Coords(self.row(i)),
        }
    }

    /// Rows reordered by `perm` (`out[i] = self[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            if self.geometry != Geometry::Indexed {
                data.extend_from_slice(self.row(p));
            }
        }
        Self { data, n: perm.len(), dim: self.dim, geometry: self.geometry }
    }
}

fn check_unit(row: &[f64]) -> Result<()> {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > SPHERE_TOL {
        return Err(Error::NotUnitNorm { norm });
    }
    Ok(())
}

/// The closed-form family of a CND kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CndKind {
    /// `‖x − x′‖²`
    SquaredEuclidean,
    /// `‖x − x′‖`
    Euclidean,
    /// `‖x − x′‖^a` with `0 < a ≤ 2`. At `a = 2` the kernel is CND but its
    /// energy distance only sees means, so it does not separate measures.
    PowerDistance(f64),
    /// `arccos⟨x, x′⟩` on the unit sphere.
    SphereGeodesic,
    /// A user-supplied symmetric matrix; points are indices into it.
    Precomputed(DMatrix<f64>),
}

/// A CND kernel together with a constant diagonal perturbation.
///
/// With `diagonal_offset = c` the kernel evaluates to `base(x, x′) + 2c`,
/// i.e. `f(x) = c` in the decomposition `‖h(x) − h(x′)‖² + f(x) + f(x′)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CndKernelSpec {
    pub kind: CndKind,
    pub diagonal_offset: f64,
}

impl CndKernelSpec {
    pub fn new(kind: CndKind) -> Result<Self> {
        let spec = Self { kind, diagonal_offset: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn squared_euclidean() -> Self {
        Self { kind: CndKind::SquaredEuclidean, diagonal_offset: 0.0 }
    }

    pub fn euclidean() -> Self {
        Self { kind: CndKind::Euclidean, diagonal_offset: 0.0 }
    }

    pub fn power(a: f64) -> Result<Self> {
        Self::new(CndKind::PowerDistance(a))
    }

    pub fn sphere_geodesic() -> Self {
        Self { kind: CndKind::SphereGeodesic, diagonal_offset: 0.0 }
    }

    pub fn precomputed(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(CndKind::Precomputed(matrix))
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        self.diagonal_offset = offset;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diagonal_offset >= 0.0 && self.diagonal_offset.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "diagonal offset must be finite and nonnegative, got {}",
                self.diagonal_offset
            )));
        }
        match &self.kind {
            CndKind::PowerDistance(a) if !(*a > 0.0 && *a <= 2.0) => {
                Err(Error::InvalidParameter(format!("power exponent must lie in (0, 2], got {a}")))
            }
            CndKind::Precomputed(m) => {
                ensure_symmetric(m, PRECOMPUTED_SYMMETRY_TOL, "precomputed kernel matrix")?;
                if m.nrows() == 0 {
                    return Err(Error::Shape("precomputed kernel matrix is empty".into()));
                }
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("precomputed kernel matrix has non-finite entries".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_precomputed(&self) -> bool {
        matches!(self.kind, CndKind::Precomputed(_))
    }

    /// Short human-readable label, e.g. `power(1.5)`.
    pub fn label(&self) -> String {
        let base = match &self.kind {
            CndKind::SquaredEuclidean => "sqeuclidean".to_string(),
            CndKind::Euclidean => "euclidean".to_string(),
            CndKind::PowerDistance(a) => format!("power({a})"),
            CndKind::SphereGeodesic => "geodesic".to_string(),
            CndKind::Precomputed(m) => format!("precomputed({}x{})", m.nrows(), m.ncols()),
        };
        if self.diagonal_offset != 0.0 {
            format!("{base}+offset({})", self.diagonal_offset)
        } else {
            base
        }
    }
}

fn coords<'a>(p: Point<'a>) -> Result<&'a [f64]> {
    match p {
        Point::Coords(c) if !c.is_empty() => Ok(c),
        Point::Coords(_) => Err(Error::DimensionMismatch { expected: 1, got: 0 }),
        Point::Index(_) => Err(Error::Shape("coordinate kernel given an index point".into())),
    }
}

fn squared_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Evaluates `γ(x, x′)`.
pub fn eval_cnd(spec: &CndKernelSpec, x: Point<'_>, xp: Point<'_>) -> Result<f64> {
    let base = match &spec.kind {
        CndKind::SquaredEuclidean => squared_distance(coords(x)?, coords(xp)?)?,
        CndKind::Euclidean => squared_distance(coords(x)?, coords(xp)?)?.sqrt(),
        CndKind::PowerDistance(a) => {
            let d2 = squared_distance(coords(x)?, coords(xp)?)?;
            if d2 == 0.0 {
                0.0
            } else {
                d2.powf(a / 2.0)
            }
        }
        CndKind::SphereGeodesic => {
            let (u, v) = (coords(x)?, coords(xp)?);
            if u.len() != v.len() {
                return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
            }
            check_unit(u)?;
            check_unit(v)?;
            if u == v {
                0.0
            } else {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                dot.clamp(-1.0, 1.0).acos().min(PI)
            }
        }
        CndKind::Precomputed(m) => {
            let (i, j) = match (x, xp) {
                (Point::Index(i), Point::Index(j)) => (i, j),
                _ => return Err(Error::Shape("precomputed kernel needs index points".into())),
            };
            let n = m.nrows();
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, len: n });
                }
            }
            m[(i, j)]
        }
    };
    Ok(base + 2.0 * spec.diagonal_offset)
}

/// Gram matrix `G_ij = γ(p_i, p_j)`, evaluated once per unordered pair.
///
/// Precomputed kernels index the points by position, so any point set of the
/// matching size may be passed.
pub fn gram_cnd(spec: &CndKernelSpec, pts: &PointSet) -> Result<DMatrix<f64>> {
    let n = pts.len();
    if let CndKind::Precomputed(m) = &spec.kind {
        if m.nrows() != n {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: n });
        }
        return Ok(m.add_scalar(2.0 * spec.diagonal_offset));
    }
    symmetric_from_fn(n, |i, j| eval_cnd(spec, pts.point(i), pts.point(j)))
}

/// `D_γ(x, x′) = sqrt(2γ(x,x′) − γ(x,x) − γ(x′,x′))`.
///
/// A radicand below `-1e-12` means the kernel violated the CND hypothesis and
/// is reported as [`Error::NotCnd`]; smaller negative rounding is clamped.
pub fn metrized_distance(spec: &CndKernelSpec, x: Point<'_>, xp: Point<'_>) -> Result<f64> {
    let radicand = 2.0 * eval_cnd(spec, x, xp)? - eval_cnd(spec, x, x)? - eval_cnd(spec, xp, xp)?;
    if radicand < -RADICAND_TOL {
        return Err(Error::NotCnd { radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `K_ij = G_iw + G_wj − G_ij − G_ww`. Row and column `w` vanish.
pub fn induced_pd_gram(g: &DMatrix<f64>, w: usize) -> Result<DMatrix<f64>> {
    let n = ensure_square(g, "CND Gram")?;
    if w >= n {
        return Err(Error::IndexOutOfRange { index: w, len: n });
    }
    symmetric_from_fn(n, |i, j| Ok(g[(i, w)] + g[(w, j)] - g[(i, j)] - g[(w, w)]))
}

/// Entrywise `exp(−r G_ij)`.
pub fn schoenberg_pd(g: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    ensure_square(g, "CND Gram")?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponential rate must be positive, got {r}")));
    }
    Ok(g.map(|v| (-r * v).exp()))
}
