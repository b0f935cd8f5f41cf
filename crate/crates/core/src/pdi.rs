//! Positive definite independent (PDI) kernels on product spaces `X × Y`.
//!
//! A symmetric kernel `𝕀` on `X × Y` is PDI when
//! `Σ c_ik c_jl 𝕀((x_i,y_k),(x_j,y_l)) ≥ 0` for every coefficient grid whose
//! rows and columns sum to zero. Three symbolic families are provided:
//!
//! - `γ ⊗ ς`, the Kronecker product of two CND kernels;
//! - `g(γ, ς)` for a Bernstein function `g` of two variables;
//! - `ψ(γ + ς)` for a completely monotone function `ψ` of order two.
//!
//! Grams over a product grid use the flattening `idx(i, k) = i·m + k` for
//! `x_i ∈ xs` (n points) and `y_k ∈ ys` (m points). The transforms here
//! ([`center_projections`], [`lift_base_point`], [`lift_square`]) all work on
//! that layout.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cnd::{eval_cnd, gram_cnd, CndKernelSpec, Point, PointSet};
use crate::error::{Error, Result};
use crate::linalg::{ensure_square, symmetric_from_fn};
use crate::special::{bernstein2_eval, cm2_eval, Bernstein2Spec, Cm2Spec};

/// Relative level below which projection kernels count as zero.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Kernel values above `-NEGATIVE_VALUE_TOL` are clamped to zero before a square root.
pub const NEGATIVE_VALUE_TOL: f64 = 1e-12;
/// Slack allowed by [`sqrt_quadrangle_check`].
pub const QUADRANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PdiFamily {
    /// `γ(x,x′)·ς(y,y′)`
    Kronecker { x: CndKernelSpec, y: CndKernelSpec },
    /// `g(γ(x,x′), ς(y,y′))`
    BernsteinCompose { g: Bernstein2Spec, x: CndKernelSpec, y: CndKernelSpec },
    /// `ψ(γ(x,x′) + ς(y,y′))`
    Cm2Compose { psi: Cm2Spec, x: CndKernelSpec, y: CndKernelSpec },
    /// A Gram over an `n × m` grid with no symbolic origin; points are indices.
    RawGrid { matrix: DMatrix<f64>, n: usize, m: usize },
}

/// A PDI kernel, optionally with its projection kernels removed by the
/// nine-term centering (see [`center_projections`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdiKernelSpec {
    pub family: PdiFamily,
    pub centered: bool,
}

impl PdiKernelSpec {
    pub fn kronecker(x: CndKernelSpec, y: CndKernelSpec) -> Self {
        Self { family: PdiFamily::Kronecker { x, y }, centered: false }
    }

    pub fn bernstein(g: Bernstein2Spec, x: CndKernelSpec, y: CndKernelSpec) -> Self {
        Self { family: PdiFamily::BernsteinCompose { g, x, y }, centered: false }
    }

    pub fn cm2(psi: Cm2Spec, x: CndKernelSpec, y: CndKernelSpec) -> Self {
        Self { family: PdiFamily::Cm2Compose { psi, x, y }, centered: false }
    }

    pub fn raw_grid(matrix: DMatrix<f64>, n: usize, m: usize) -> Result<Self> {
        let spec = Self { family: PdiFamily::RawGrid { matrix, n, m }, centered: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn centered(mut self) -> Self {
        self.centered = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            PdiFamily::Kronecker { x, y } => {
                x.validate()?;
                y.validate()
            }
            PdiFamily::BernsteinCompose { g, x, y } => {
                g.validate()?;
                x.validate()?;
                y.validate()
            }
            PdiFamily::Cm2Compose { psi, x, y } => {
                psi.validate()?;
                x.validate()?;
                y.validate()
            }
            PdiFamily::RawGrid { matrix, n, m } => {
                let size = ensure_square(matrix, "raw grid Gram")?;
                if *n == 0 || *m == 0 || size != n * m {
                    return Err(Error::Shape(format!("raw grid {n}x{m} does not match matrix of size {size}")));
                }
                crate::linalg::ensure_symmetric(matrix, crate::certify::SYMMETRY_TOL, "raw grid Gram")?;
                Ok(())
            }
        }
    }

    /// The two CND factors, for the symbolic families.
    pub fn factors(&self) -> Option<(&CndKernelSpec, &CndKernelSpec)> {
        match &self.family {
            PdiFamily::Kronecker { x, y }
            | PdiFamily::BernsteinCompose { x, y, .. }
            | PdiFamily::Cm2Compose { x, y, .. } => Some((x, y)),
            PdiFamily::RawGrid { .. } => None,
        }
    }

    /// Symbolic families depend on `(x, x′)` and `(y, y′)` only through
    /// `γ(x,x′)` and `ς(y,y′)`, which makes them 2-symmetric.
    pub fn is_two_symmetric(&self) -> bool {
        match &self.family {
            PdiFamily::RawGrid { matrix, n, m } => {
                two_symmetry_residual(matrix, *n, *m) <= PROJECTION_TOL * scale_of(matrix)
            }
            _ => true,
        }
    }

    /// Combines factor values `γ(x,x′)` and `ς(y,y′)` (symbolic families only).
    pub fn combine(&self, gx: f64, gy: f64) -> Result<f64> {
        match &self.family {
            PdiFamily::Kronecker { .. } => Ok(gx * gy),
            PdiFamily::BernsteinCompose { g, .. } => bernstein2_eval(g, gx, gy),
            PdiFamily::Cm2Compose { psi, .. } => cm2_eval(psi, gx + gy),
            PdiFamily::RawGrid { .. } => Err(Error::Unsupported("raw grids have no factor kernels".into())),
        }
    }

    pub fn label(&self) -> String {
        let base = match &self.family {
            PdiFamily::Kronecker { x, y } => format!("kronecker({}, {})", x.label(), y.label()),
            PdiFamily::BernsteinCompose { g, x, y } => {
                format!("bernstein2[{}]({}, {})", g.label(), x.label(), y.label())
            }
            PdiFamily::Cm2Compose { psi, x, y } => format!("cm2[{}]({} + {})", psi.label(), x.label(), y.label()),
            PdiFamily::RawGrid { n, m, .. } => format!("rawgrid({n}x{m})"),
        };
        if self.centered {
            format!("centered {base}")
        } else {
            base
        }
    }
}

fn scale_of(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

fn raw_eval(spec: &PdiKernelSpec, x: Point<'_>, y: Point<'_>, xp: Point<'_>, yp: Point<'_>) -> Result<f64> {
    match &spec.family {
        PdiFamily::RawGrid { matrix, n, m } => {
            let idx = |p: Point<'_>, len: usize| match p {
                Point::Index(i) if i < len => Ok(i),
                Point::Index(i) => Err(Error::IndexOutOfRange { index: i, len }),
                Point::Coords(_) => Err(Error::Shape("raw grid kernel needs index points".into())),
            };
            let (i, k, j, l) = (idx(x, *n)?, idx(y, *m)?, idx(xp, *n)?, idx(yp, *m)?);
            Ok(matrix[(i * m + k, j * m + l)])
        }
        _ => {
            let (gs, vs) = spec.factors().expect("symbolic family");
            spec.combine(eval_cnd(gs, x, xp)?, eval_cnd(vs, y, yp)?)
        }
    }
}

/// Nine-term projection centering on abstract coordinates: `f(a, b, c, d)`
/// is `𝕀((x_a, y_b), (x_c, y_d))` and the result is `𝕀′((x_0, y_0), (x_1, y_1))`
/// with `(x_0, y_0, x_1, y_1) = (x, y, x1, y1)`.
pub(crate) fn nine_term<I: Copy, J: Copy, F>(mut f: F, x: I, y: J, x1: I, y1: J) -> Result<f64>
where
    F: FnMut(I, J, I, J) -> Result<f64>,
{
    let full = f(x, y, x1, y1)?;
    let halves = f(x, y, x, y1)? + f(x1, y, x1, y1)? + f(x, y, x1, y)? + f(x, y1, x1, y1)?;
    let quarters = f(x, y, x, y)? + f(x, y1, x, y1)? + f(x1, y, x1, y)? + f(x1, y1, x1, y1)?;
    Ok(full - halves / 2.0 + quarters / 4.0)
}

/// `Σ_{a,b,c,d ∈ {0,1}} (−1)^{a+b+c+d} f(lx[a], ly[b], rx[c], ry[d])`, summed
/// one right-hand argument at a time.
fn sixteen_term<I: Copy, J: Copy, F>(mut f: F, lx: [I; 2], ly: [J; 2], rx: [I; 2], ry: [J; 2]) -> f64
where
    F: FnMut(I, J, I, J) -> f64,
{
    const SIGN: [f64; 2] = [1.0, -1.0];
    let mut total = 0.0;
    for d in 0..2 {
        for c in 0..2 {
            for b in 0..2 {
                for a in 0..2 {
                    total += SIGN[a] * SIGN[b] * SIGN[c] * SIGN[d] * f(lx[a], ly[b], rx[c], ry[d]);
                }
            }
        }
    }
    total
}

/// Evaluates `𝕀((x, y), (x′, y′))`.
pub fn eval_pdi(spec: &PdiKernelSpec, (x, y): (Point<'_>, Point<'_>), (xp, yp): (Point<'_>, Point<'_>)) -> Result<f64> {
    if !spec.centered {
        return raw_eval(spec, x, y, xp, yp);
    }
    let xs = [x, xp];
    let ys = [y, yp];
    nine_term(|a: usize, b: usize, c: usize, d: usize| raw_eval(spec, xs[a], ys[b], xs[c], ys[d]), 0, 0, 1, 1)
}

/// A finite grid `xs × ys` with flattening `idx(i, k) = i·m + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    pub xs: PointSet,
    pub ys: PointSet,
}

impl ProductGrid {
    pub fn new(xs: PointSet, ys: PointSet) -> Self {
        Self { xs, ys }
    }

    /// An abstract `n × m` grid, for raw-grid kernels.
    pub fn indexed(n: usize, m: usize) -> Result<Self> {
        Ok(Self { xs: PointSet::indexed(n)?, ys: PointSet::indexed(m)? })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn m(&self) -> usize {
        self.ys.len()
    }

    pub fn size(&self) -> usize {
        self.n() * self.m()
    }

    pub fn idx(&self, i: usize, k: usize) -> usize {
        i * self.m() + k
    }

    /// Inverse of [`ProductGrid::idx`].
    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.m(), flat % self.m())
    }
}

/// `M[idx(i,k), idx(j,l)] = 𝕀((x_i, y_k), (x_j, y_l))`, exactly symmetric.
pub fn gram_pdi(spec: &PdiKernelSpec, grid: &ProductGrid) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let (n, m) = (grid.n(), grid.m());
    let raw = match &spec.family {
        PdiFamily::RawGrid { matrix, n: rn, m: rm } => {
            if (*rn, *rm) != (n, m) {
                return Err(Error::Shape(format!("raw grid is {rn}x{rm}, product grid is {n}x{m}")));
            }
            // mirror the upper triangle so the output is exactly symmetric
            symmetric_from_fn(n * m, |a, b| Ok(matrix[(a, b)]))?
        }
        _ => {
            let (gs, vs) = spec.factors().expect("symbolic family");
            let gx = gram_cnd(gs, &grid.xs)?;
            let gy = gram_cnd(vs, &grid.ys)?;
            symmetric_from_fn(n * m, |a, b| {
                let (i, k) = (a / m, a % m);
                let (j, l) = (b / m, b % m);
                spec.combine(gx[(i, j)], gy[(k, l)])
            })?
        }
    };
    if spec.centered {
        center_projections(&raw, n, m)
    } else {
        Ok(raw)
    }
}

fn check_grid(g: &DMatrix<f64>, n: usize, m: usize) -> Result<()> {
    let size = ensure_square(g, "grid Gram")?;
    if n == 0 || m == 0 || size != n * m {
        return Err(Error::Shape(format!("grid {n}x{m} does not match Gram of size {size}")));
    }
    Ok(())
}

/// Removes the projection kernels of a grid Gram:
///
/// ```text
/// 𝕀′(a, b) = 𝕀((x,y),(x′,y′))
///          − [𝕀((x,y),(x,y′)) + 𝕀((x′,y),(x′,y′)) + 𝕀((x,y),(x′,y)) + 𝕀((x,y′),(x′,y′))]/2
///          + [𝕀((x,y),(x,y)) + 𝕀((x,y′),(x,y′)) + 𝕀((x′,y),(x′,y)) + 𝕀((x′,y′),(x′,y′))]/4
/// ```
///
/// The constrained quadratic form is unchanged and both projection kernels
/// of the output vanish.
pub fn center_projections(g: &DMatrix<f64>, n: usize, m: usize) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    symmetric_from_fn(n * m, |a, b| {
        let (i, k) = (a / m, a % m);
        let (j, l) = (b / m, b % m);
        nine_term(|p: usize, q: usize, r: usize, s: usize| Ok(g[(p * m + q, r * m + s)]), i, k, j, l)
    })
}

/// The base-point lift `K^𝕀` on the grid: sixteen signed evaluations with
/// the base point `(x_{i₀}, y_{k₀})` substituted in every slot combination.
/// `K^𝕀` is PD exactly when the input is PDI.
pub fn lift_base_point(g: &DMatrix<f64>, n: usize, m: usize, base: (usize, usize)) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    let (i0, k0) = base;
    if i0 >= n {
        return Err(Error::IndexOutOfRange { index: i0, len: n });
    }
    if k0 >= m {
        return Err(Error::IndexOutOfRange { index: k0, len: m });
    }
    symmetric_from_fn(n * m, |a, b| {
        let (i, k) = (a / m, a % m);
        let (j, l) = (b / m, b % m);
        Ok(sixteen_term(|p, q, r, s| g[(p * m + q, r * m + s)], [i, i0], [k, k0], [j, i0], [l, k0]))
    })
}

/// A point `[x_i, y_k, z_j, w_l]` of `(X × Y)²`, as grid indices `(i, k, j, l)`.
pub type Quadruple = (usize, usize, usize, usize);

/// One entry of the square lift `K_𝕀` on `(X × Y)²`.
pub fn lift_square_entry(g: &DMatrix<f64>, n: usize, m: usize, p: Quadruple, q: Quadruple) -> Result<f64> {
    check_grid(g, n, m)?;
    for (i, k, j, l) in [p, q] {
        for (idx, len) in [(i, n), (k, m), (j, n), (l, m)] {
            if idx >= len {
                return Err(Error::IndexOutOfRange { index: idx, len });
            }
        }
    }
    let (x, y, z, w) = p;
    let (xp, yp, zp, wp) = q;
    Ok(sixteen_term(|a, b, c, d| g[(a * m + b, c * m + d)], [x, z], [y, w], [xp, zp], [yp, wp]))
}

/// Gram of the square lift over a list of quadruples. PD exactly when the
/// grid kernel is PDI.
pub fn lift_square(g: &DMatrix<f64>, n: usize, m: usize, quads: &[Quadruple]) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    symmetric_from_fn(quads.len(), |a, b| lift_square_entry(g, n, m, quads[a], quads[b]))
}

/// Square lift of a Kronecker kernel in factored form:
/// `[γ(x,x′) + γ(z,z′) − γ(x,z′) − γ(z,x′)]·[ς(y,y′) + ς(w,w′) − ς(y,w′) − ς(w,y′)]`.
pub fn kronecker_square_entry(gx: &DMatrix<f64>, gy: &DMatrix<f64>, p: Quadruple, q: Quadruple) -> f64 {
    let (x, y, z, w) = p;
    let (xp, yp, zp, wp) = q;
    let bx = gx[(x, xp)] + gx[(z, zp)] - gx[(x, zp)] - gx[(z, xp)];
    let by = gy[(y, yp)] + gy[(w, wp)] - gy[(y, wp)] - gy[(w, yp)];
    bx * by
}

/// Largest projection-kernel value `|𝕀((x,y),(x,y′))|`, `|𝕀((x,y),(x′,y))|` on the grid.
pub fn max_projection(g: &DMatrix<f64>, n: usize, m: usize) -> Result<f64> {
    check_grid(g, n, m)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for k in 0..m {
            for l in 0..m {
                worst = worst.max(g[(i * m + k, i * m + l)].abs());
            }
            for j in 0..n {
                worst = worst.max(g[(i * m + k, j * m + k)].abs());
            }
        }
    }
    Ok(worst)
}

/// Largest `|𝕀((x,y),(x′,y′)) − 𝕀((x,y′),(x′,y))|` on the grid.
pub fn two_symmetry_residual(g: &DMatrix<f64>, n: usize, m: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    worst = worst.max((g[(i * m + k, j * m + l)] - g[(i * m + l, j * m + k)]).abs());
                }
            }
        }
    }
    worst
}

/// The `X`-slice `(x_i, x_j) ↦ 𝕀((x_i, y_k), (x_j, y_l))` for fixed `y_k, y_l`.
pub fn x_slice(g: &DMatrix<f64>, n: usize, m: usize, k: usize, l: usize) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    if k >= m || l >= m {
        return Err(Error::IndexOutOfRange { index: k.max(l), len: m });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| g[(i * m + k, j * m + l)]))
}

/// The `Y`-slice `(y_k, y_l) ↦ 𝕀((x_i, y_k), (x_j, y_l))` for fixed `x_i, x_j`.
pub fn y_slice(g: &DMatrix<f64>, n: usize, m: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { index: i.max(j), len: n });
    }
    Ok(DMatrix::from_fn(m, m, |k, l| g[(i * m + k, j * m + l)]))
}

/// `(x, x′) ↦ −Σ_kl e_k e_l 𝕀((x, y_k), (x′, y_l))` for sum-zero `e`.
/// CND on `X` whenever the grid kernel is PDI.
pub fn projected_x_kernel(g: &DMatrix<f64>, n: usize, m: usize, e: &[f64]) -> Result<DMatrix<f64>> {
    check_grid(g, n, m)?;
    if e.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: e.len() });
    }
    let sum: f64 = e.iter().sum();
    if sum.abs() > 1e-12 * e.iter().fold(1.0_f64, |a, v| a.max(v.abs())) {
        return Err(Error::WeightSum { sum });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut acc = 0.0;
        for k in 0..m {
            for l in 0..m {
                acc += e[k] * e[l] * g[(i * m + k, j * m + l)];
            }
        }
        -acc
    }))
}

/// Residuals of the RKHS quadrangle identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RkhsResidual {
    /// `max |2𝕀(a,b) + 2𝕀(a′,b′) − ‖K_a + K_b − K_a′ − K_b′‖²|`
    pub max_residual: f64,
    /// `max |4𝕀(a,b) − ‖…‖²|`, meaningful for 2-symmetric kernels.
    pub max_two_symmetric_residual: f64,
}

/// For a PDI kernel with vanishing projections, checks
/// `2𝕀((x,y),(x′,y′)) + 2𝕀((x,y′),(x′,y)) = ‖K_{x,y} + K_{x′,y′} − K_{x,y′} − K_{x′,y}‖²`
/// in the RKHS of the base-point lift, over the supplied index pairs
/// `((i,k), (j,l))` standing for `(x_i, y_k)` and `(x_j, y_l)`.
pub fn rkhs_identity_residual(
    spec: &PdiKernelSpec,
    grid: &ProductGrid,
    pairs: &[((usize, usize), (usize, usize))],
    base: (usize, usize),
) -> Result<RkhsResidual> {
    let g = gram_pdi(spec, grid)?;
    let (n, m) = (grid.n(), grid.m());
    if max_projection(&g, n, m)? > PROJECTION_TOL * scale_of(&g) {
        return Err(Error::NotCentered);
    }
    let k = lift_base_point(&g, n, m, base)?;
    let mut out = RkhsResidual { max_residual: 0.0, max_two_symmetric_residual: 0.0 };
    for &((i, kk), (j, l)) in pairs {
        for (idx, len) in [(i, n), (j, n), (kk, m), (l, m)] {
            if idx >= len {
                return Err(Error::IndexOutOfRange { index: idx, len });
            }
        }
        let at = |a: usize, b: usize| a * m + b;
        let terms = [(at(i, kk), 1.0), (at(j, l), 1.0), (at(i, l), -1.0), (at(j, kk), -1.0)];
        let mut rhs = 0.0;
        for &(p, sp) in &terms {
            for &(q, sq) in &terms {
                rhs += sp * sq * k[(p, q)];
            }
        }
        let direct = g[(at(i, kk), at(j, l))];
        let swapped = g[(at(i, l), at(j, kk))];
        out.max_residual = out.max_residual.max((2.0 * direct + 2.0 * swapped - rhs).abs());
        out.max_two_symmetric_residual = out.max_two_symmetric_residual.max((4.0 * direct - rhs).abs());
    }
    Ok(out)
}

/// One draw `(x, x′, z; y, y′, w)` for [`sqrt_quadrangle_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrangleSample {
    pub x: Vec<f64>,
    pub xp: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadrangleReport {
    pub samples: usize,
    pub violations: usize,
    pub max_excess: f64,
}

fn sqrt_clamped(v: f64) -> Result<f64> {
    if v < -NEGATIVE_VALUE_TOL {
        return Err(Error::NotPdi { value: v });
    }
    Ok(v.max(0.0).sqrt())
}

/// Checks `√𝕀((x,y),(x′,y′)) ≤ √𝕀((x,y),(z,w)) + √𝕀((x,y′),(z,w)) + √𝕀((x′,y),(z,w)) + √𝕀((x′,y′),(z,w))`
/// for a centered 2-symmetric PDI kernel.
pub fn sqrt_quadrangle_check(spec: &PdiKernelSpec, samples: &[QuadrangleSample]) -> Result<QuadrangleReport> {
    let mut report = QuadrangleReport { samples: samples.len(), ..Default::default() };
    for s in samples {
        let e = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| {
            eval_pdi(spec, (Point::Coords(a), Point::Coords(b)), (Point::Coords(c), Point::Coords(d)))
        };
        let lhs = sqrt_clamped(e(&s.x, &s.y, &s.xp, &s.yp)?)?;
        let rhs = sqrt_clamped(e(&s.x, &s.y, &s.z, &s.w)?)?
            + sqrt_clamped(e(&s.x, &s.yp, &s.z, &s.w)?)?
            + sqrt_clamped(e(&s.xp, &s.y, &s.z, &s.w)?)?
            + sqrt_clamped(e(&s.xp, &s.yp, &s.z, &s.w)?)?;
        let excess = lhs - rhs;
        report.max_excess = report.max_excess.max(excess);
        if excess > QUADRANGLE_SLACK {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformVerdict {
    /// The two test vectors give quadratic forms of strictly opposite sign.
    NotPd,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    /// `c = 𝕀((x,y),(x′,y′))`
    pub kernel_value: f64,
    /// `⟨A v₁, v₁⟩` with `v₁ = (−1, 1, −1, 1)`
    pub form_v1: f64,
    /// `⟨A v₂, v₂⟩` with `v₂ = (−1, 1, 1, −1)`
    pub form_v2: f64,
    pub verdict: TransformVerdict,
}

/// Shows that `f(𝕀)` is not positive definite for nonconstant `f`.
///
/// Builds the interpolation matrix `A` of `f(𝕀)` at `(x,y), (x,y′), (x′,y), (x′,y′)`.
/// For a centered 2-symmetric kernel this is the matrix with `f(0)` off the
/// anti-diagonal and `f(c)` on it, and the two test vectors give
/// `4(f(0) − f(c))` and `4(f(c) − f(0))`.
pub fn nonconstant_transform_not_pd<F>(
    f: F,
    spec: &PdiKernelSpec,
    (x, xp): (Point<'_>, Point<'_>),
    (y, yp): (Point<'_>, Point<'_>),
) -> Result<TransformReport>
where
    F: Fn(f64) -> f64,
{
    let c = eval_pdi(spec, (x, y), (xp, yp))?;
    if c.abs() <= NEGATIVE_VALUE_TOL {
        return Err(Error::DegenerateWitness);
    }
    let pts = [(x, y), (x, yp), (xp, y), (xp, yp)];
    let mut a = DMatrix::zeros(4, 4);
    for p in 0..4 {
        for q in p..4 {
            let v = f(eval_pdi(spec, pts[p], pts[q])?);
            a[(p, q)] = v;
            a[(q, p)] = v;
        }
    }
    let form = |v: [f64; 4]| {
        let mut s = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                s += v[p] * v[q] * a[(p, q)];
            }
        }
        s
    };
    let form_v1 = form([-1.0, 1.0, -1.0, 1.0]);
    let form_v2 = form([-1.0, 1.0, 1.0, -1.0]);
    let tol = 1e-12 * a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let opposite = (form_v1 > tol && form_v2 < -tol) || (form_v1 < -tol && form_v2 > tol);
    Ok(TransformReport {
        kernel_value: c,
        form_v1,
        form_v2,
        verdict: if opposite { TransformVerdict::NotPd } else { TransformVerdict::Inconclusive },
    })
}
