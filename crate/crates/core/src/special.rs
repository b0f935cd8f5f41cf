//! Bernstein functions of one and two variables, completely monotone
//! functions of order two, and their Lévy-type integral representations.
//!
//! Representing measures are always finite atom sums ([`DiscreteMeasure`]).
//! The `r = 0` limits of the representation integrands are exact branches:
//!
//! - `(1 − e^{−rt})(1 + r)/r → t`
//! - `(1 − e^{−r t})/r → t` in each factor of the two-variable integrand.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};

/// Slack allowed by [`check_two_variable_inequalities`].
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// `(ω_ℓ(s), e_ℓ(s), E_ℓ(s))` for `ℓ ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaTerms {
    pub omega: f64,
    pub e: f64,
    pub big_e: f64,
}

/// `ω_ℓ(s) = Σ_{l<ℓ} (−s)^l / l!`, `e_ℓ(s) = e^{−s} Σ_{l<ℓ} s^l / l!` and
/// `E_ℓ(s) = (−1)^ℓ (e^{−s} − ω_ℓ(s))`.
pub fn omega_e_terms(ell: u32, s: f64) -> Result<OmegaTerms> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s must be nonnegative, got {s}")));
    }
    match ell {
        1 => Ok(OmegaTerms { omega: 1.0, e: (-s).exp(), big_e: -(-s).exp_m1() }),
        2 => Ok(OmegaTerms { omega: 1.0 - s, e: (-s).exp() * (1.0 + s), big_e: big_e2(s) }),
        _ => Err(Error::InvalidParameter(format!("order ℓ must be 1 or 2, got {ell}"))),
    }
}

/// `E₂(s) = e^{−s} − 1 + s`, with a series branch near zero.
pub(crate) fn big_e2(s: f64) -> f64 {
    if s.abs() < 0.1 {
        // s²/2 − s³/6 + s⁴/24 − …
        let mut term = s * s / 2.0;
        let mut sum = term;
        for k in 3..20 {
            term *= -s / k as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-s).exp_m1() + s
    }
}

/// `(1 − e^{−rt})/r`, equal to `t` at `r = 0`.
pub(crate) fn saturate(r: f64, t: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        -(-r * t).exp_m1() / r
    }
}

/// Nonnegative atoms `(r_j, w_j)`, sorted by `r` with no repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
    allow_zero_atom: bool,
}

impl DiscreteMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>, allow_zero_atom: bool) -> Result<Self> {
        for &(r, w) in &atoms {
            if !(r.is_finite() && w.is_finite()) {
                return Err(Error::InvalidParameter("atoms must be finite".into()));
            }
            if r < 0.0 || (r == 0.0 && !allow_zero_atom) {
                return Err(Error::InvalidParameter(format!("atom location {r} not allowed")));
            }
            if w <= 0.0 {
                return Err(Error::InvalidParameter(format!("atom weight must be positive, got {w}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::InvalidParameter("duplicate atom locations".into()));
        }
        Ok(Self { atoms, allow_zero_atom })
    }

    /// An empty measure.
    pub fn empty(allow_zero_atom: bool) -> Self {
        Self { atoms: Vec::new(), allow_zero_atom }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn allows_zero_atom(&self) -> bool {
        self.allow_zero_atom
    }
}

/// A Bernstein function of one variable (first derivative completely monotone).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bernstein1Spec {
    /// `a·t`, `a ≥ 0`
    Linear(f64),
    /// `t^a`, `a ∈ (0, 1]`
    Power(f64),
    /// `log(1 + t)`
    Log1p,
    /// `(1 − e^{−rt})/r`, `r > 0`
    ExpSaturate(f64),
    /// `ψ(0) + Σ w (1 − e^{−rt})(1 + r)/r`
    Mixture { measure: DiscreteMeasure, at_zero: f64 },
}

impl Bernstein1Spec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear(a) if !(*a >= 0.0 && a.is_finite()) => {
                Err(Error::InvalidParameter(format!("linear slope must be ≥ 0, got {a}")))
            }
            Self::Power(a) if !(*a > 0.0 && *a <= 1.0) => {
                Err(Error::InvalidParameter(format!("Bernstein power must lie in (0, 1], got {a}")))
            }
            Self::ExpSaturate(r) if !(*r > 0.0 && r.is_finite()) => {
                Err(Error::InvalidParameter(format!("saturation rate must be > 0, got {r}")))
            }
            Self::Mixture { measure, at_zero } => {
                if !at_zero.is_finite() {
                    return Err(Error::InvalidParameter("ψ(0) must be finite".into()));
                }
                if !measure.allows_zero_atom() && measure.atoms().iter().any(|a| a.0 == 0.0) {
                    return Err(Error::InvalidParameter("zero atom not permitted".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        match self {
            Self::Mixture { at_zero, .. } => *at_zero,
            _ => 0.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Linear(a) => format!("linear:{a}"),
            Self::Power(a) => format!("power:{a}"),
            Self::Log1p => "log1p".into(),
            Self::ExpSaturate(r) => format!("expsat:{r}"),
            Self::Mixture { measure, at_zero } => {
                format!("mixture({} atoms, ψ(0)={at_zero})", measure.atoms().len())
            }
        }
    }
}

pub fn bernstein1_eval(spec: &Bernstein1Spec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("argument must be nonnegative, got {t}")));
    }
    spec.validate()?;
    Ok(match spec {
        Bernstein1Spec::Linear(a) => a * t,
        Bernstein1Spec::Power(a) => {
            if t == 0.0 {
                0.0
            } else {
                t.powf(*a)
            }
        }
        Bernstein1Spec::Log1p => t.ln_1p(),
        Bernstein1Spec::ExpSaturate(r) => saturate(*r, t),
        Bernstein1Spec::Mixture { measure, at_zero } => {
            at_zero + measure.atoms().iter().map(|&(r, w)| w * saturate(r, t) * (1.0 + r)).sum::<f64>()
        }
    })
}

/// A Bernstein function of two variables (`∂₁∂₂g` completely monotone).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bernstein2Spec {
    /// `g₁(t₁)·g₂(t₂)`
    ProductOfBernstein1(Bernstein1Spec, Bernstein1Spec),
    /// `Σ w (1 − e^{−r₁t₁})/r₁ · (1 − e^{−r₂t₂})/r₂ · (1 + r₁)(1 + r₂)`
    Mixture2(Vec<(f64, f64, f64)>),
    /// `core(t₁, t₂) + left(t₁) + right(t₂)` for a boundary-zero `core`.
    BoundaryAugmented { core: Box<Bernstein2Spec>, left: Bernstein1Spec, right: Bernstein1Spec },
}

impl Bernstein2Spec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ProductOfBernstein1(a, b) => {
                a.validate()?;
                b.validate()
            }
            Self::Mixture2(atoms) => {
                for &(r1, r2, w) in atoms {
                    if !(r1 >= 0.0 && r2 >= 0.0 && r1.is_finite() && r2.is_finite()) {
                        return Err(Error::InvalidParameter(format!("atom location ({r1}, {r2}) invalid")));
                    }
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(Error::InvalidParameter(format!("atom weight must be positive, got {w}")));
                    }
                }
                Ok(())
            }
            Self::BoundaryAugmented { core, left, right } => {
                core.validate()?;
                left.validate()?;
                right.validate()?;
                if !core.is_zero_at_boundary() {
                    return Err(Error::InvalidParameter("augmented core must vanish on the boundary".into()));
                }
                Ok(())
            }
        }
    }

    /// Whether `g(t, 0) = g(0, t) = 0` for all `t`.
    pub fn is_zero_at_boundary(&self) -> bool {
        match self {
            Self::ProductOfBernstein1(a, b) => a.value_at_zero() == 0.0 && b.value_at_zero() == 0.0,
            Self::Mixture2(_) => true,
            Self::BoundaryAugmented { left, right, .. } => {
                // left(t) + right(0) ≡ 0 only when both sides are identically zero
                is_identically_zero(left) && is_identically_zero(right)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::ProductOfBernstein1(a, b) => format!("product({}, {})", a.label(), b.label()),
            Self::Mixture2(atoms) => format!("mixture2({} atoms)", atoms.len()),
            Self::BoundaryAugmented { core, left, right } => {
                format!("augmented({}, {}, {})", core.label(), left.label(), right.label())
            }
        }
    }
}

fn is_identically_zero(g: &Bernstein1Spec) -> bool {
    match g {
        Bernstein1Spec::Linear(a) => *a == 0.0,
        Bernstein1Spec::Mixture { measure, at_zero } => measure.atoms().is_empty() && *at_zero == 0.0,
        _ => false,
    }
}

pub fn bernstein2_eval(spec: &Bernstein2Spec, t1: f64, t2: f64) -> Result<f64> {
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::InvalidParameter(format!("arguments must be nonnegative, got ({t1}, {t2})")));
    }
    spec.validate()?;
    eval2_unchecked(spec, t1, t2)
}

fn eval2_unchecked(spec: &Bernstein2Spec, t1: f64, t2: f64) -> Result<f64> {
    Ok(match spec {
        Bernstein2Spec::ProductOfBernstein1(a, b) => bernstein1_eval(a, t1)? * bernstein1_eval(b, t2)?,
        Bernstein2Spec::Mixture2(atoms) => {
            atoms.iter().map(|&(r1, r2, w)| w * saturate(r1, t1) * (1.0 + r1) * saturate(r2, t2) * (1.0 + r2)).sum()
        }
        Bernstein2Spec::BoundaryAugmented { core, left, right } => {
            eval2_unchecked(core, t1, t2)? + bernstein1_eval(left, t1)? + bernstein1_eval(right, t2)?
        }
    })
}

/// A completely monotone function of order two (`f''` completely monotone).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cm2Spec {
    /// `t^a`, `a ∈ (1, 2)`
    PowerA(f64),
    /// `t·log t`, `0` at `t = 0`
    TLogT,
    /// `a₀ + a₁t + a₂t²`, `a₂ ≥ 0`
    Quadratic { a0: f64, a1: f64, a2: f64 },
    /// `a₀ + a₁t + a₂t² + Σ w (e^{−rt} − e₂(r)ω₂(rt))(1 + r²)/r²` over atoms `r > 0`.
    Mixture { measure: DiscreteMeasure, a0: f64, a1: f64, a2: f64 },
}

impl Cm2Spec {
    /// `e^{−rt}` written in the mixture representation: one atom at `r` with
    /// weight `r²/(1 + r²)` plus the affine part `e₂(r)ω₂(rt)` it subtracts.
    pub fn exponential(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponential rate must be > 0, got {r}")));
        }
        let e2 = (-r).exp() * (1.0 + r);
        Ok(Self::Mixture {
            measure: DiscreteMeasure::new(vec![(r, r * r / (1.0 + r * r))], false)?,
            a0: e2,
            a1: -r * e2,
            a2: 0.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let check_poly = |a0: f64, a1: f64, a2: f64| {
            if !(a0.is_finite() && a1.is_finite() && a2.is_finite()) {
                return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
            }
            if a2 < 0.0 {
                return Err(Error::InvalidParameter(format!("quadratic coefficient must be ≥ 0, got {a2}")));
            }
            Ok(())
        };
        match self {
            Self::PowerA(a) if !(*a > 1.0 && *a < 2.0) => {
                Err(Error::InvalidParameter(format!("CM₂ power must lie in (1, 2), got {a}")))
            }
            Self::Quadratic { a0, a1, a2 } => check_poly(*a0, *a1, *a2),
            Self::Mixture { measure, a0, a1, a2 } => {
                if measure.atoms().iter().any(|a| a.0 == 0.0) {
                    return Err(Error::InvalidParameter("CM₂ mixture atoms must satisfy r > 0".into()));
                }
                check_poly(*a0, *a1, *a2)
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::PowerA(a) => format!("t^{a}"),
            Self::TLogT => "t·log t".into(),
            Self::Quadratic { a0, a1, a2 } => format!("{a0} + {a1}t + {a2}t²"),
            Self::Mixture { measure, a0, a1, a2 } => {
                format!("mixture({} atoms) + {a0} + {a1}t + {a2}t²", measure.atoms().len())
            }
        }
    }
}

/// One CM₂ representation term `(e^{−rt} − e₂(r)ω₂(rt))(1 + r²)/r²`.
pub(crate) fn cm2_atom_term(r: f64, t: f64) -> f64 {
    let e2 = (-r).exp() * (1.0 + r);
    ((-r * t).exp() - e2 * (1.0 - r * t)) * (1.0 + r * r) / (r * r)
}

pub fn cm2_eval(spec: &Cm2Spec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("argument must be nonnegative, got {t}")));
    }
    spec.validate()?;
    Ok(match spec {
        Cm2Spec::PowerA(a) => {
            if t == 0.0 {
                0.0
            } else {
                t.powf(*a)
            }
        }
        Cm2Spec::TLogT => {
            if t == 0.0 {
                0.0
            } else {
                t * t.ln()
            }
        }
        Cm2Spec::Quadratic { a0, a1, a2 } => a0 + a1 * t + a2 * t * t,
        Cm2Spec::Mixture { measure, a0, a1, a2 } => {
            a0 + a1 * t + a2 * t * t + measure.atoms().iter().map(|&(r, w)| w * cm2_atom_term(r, t)).sum::<f64>()
        }
    })
}

/// Log-spaced nodes on `[r_min, r_max]` for the trapezoidal rule in `log r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { r_min: 1e-6, r_max: 1e3, nodes: 4000 }
    }
}

impl QuadratureGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) || self.nodes < 2 {
            return Err(Error::InvalidParameter(format!("bad quadrature grid {self:?}")));
        }
        Ok(())
    }

    /// Trapezoidal rule in `u = log r` for `∫_{r_min}^{r_max} f(r) dr`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let (lo, hi) = (self.r_min.ln(), self.r_max.ln());
        let h = (hi - lo) / (self.nodes - 1) as f64;
        let mut sum = 0.0;
        for j in 0..self.nodes {
            let r = (lo + h * j as f64).exp();
            let weight = if j == 0 || j == self.nodes - 1 { 0.5 } else { 1.0 };
            sum += weight * f(r) * r;
        }
        sum * h
    }
}

/// `Γ(−a, x)` for `a ∈ (1, 2)` by downward recursion from `Γ(2 − a, x)`.
pub(crate) fn upper_gamma_negative(a: f64, x: f64) -> f64 {
    if x > 700.0 {
        return 0.0;
    }
    let s = 2.0 - a;
    let g2 = gamma(s) * gamma_ur(s, x);
    let g1 = (g2 - x.powf(1.0 - a) * (-x).exp()) / (1.0 - a);
    (g1 - x.powf(-a) * (-x).exp()) / (-a)
}

/// Normalising constant `1/Γ(−a)` of `t^a = c ∫ (e^{−rt} − 1 + rt) r^{−1−a} dr`.
/// Equals `3/(4√π)` at `a = 3/2`.
pub fn power_levy_constant(a: f64) -> f64 {
    1.0 / gamma(-a)
}

fn levy_integral(t: f64, a: f64, grid: &QuadratureGrid) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let middle = grid.integrate(|r| big_e2(r * t) * r.powf(-1.0 - a));

    // [0, r_min]: Σ_{k≥2} (−t)^k/k! · r_min^{k−a}/(k−a)
    let mut lower = 0.0;
    let mut coef = 1.0; // (−t)^k / k!
    for k in 1..60 {
        coef *= -t / k as f64;
        if k < 2 {
            continue;
        }
        let term = coef * grid.r_min.powf(k as f64 - a) / (k as f64 - a);
        lower += term;
        if term.abs() < 1e-20 * lower.abs() {
            break;
        }
    }

    // [r_max, ∞): (rt − 1) part in closed form, e^{−rt} part via Γ(−a, r_max t).
    let big_r = grid.r_max;
    let upper =
        t * big_r.powf(1.0 - a) / (a - 1.0) - big_r.powf(-a) / a + t.powf(a) * upper_gamma_negative(a, big_r * t);

    middle + lower + upper
}

/// Evaluates `t^a` for `a ∈ (1, 2)` through its integral representation
/// `t^a = (1/Γ(−a)) ∫₀^∞ (e^{−rt} − 1 + rt) r^{−1−a} dr`.
///
/// The integral is split into a trapezoidal sum on the log grid plus closed
/// forms for `[0, r_min]` and `[r_max, ∞)`. Each call self-checks the grid
/// at `t = 1`, where the result must be `1` to within `1e−6`.
pub fn cm2_from_quadrature(t: f64, a: f64, grid: &QuadratureGrid) -> Result<f64> {
    if !(a > 1.0 && a < 2.0) {
        return Err(Error::InvalidParameter(format!("exponent must lie in (1, 2), got {a}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("argument must be finite and ≥ 0, got {t}")));
    }
    grid.validate()?;
    let c = power_levy_constant(a);
    let residual = (c * levy_integral(1.0, a, grid) - 1.0).abs();
    if !(residual <= 1e-6) {
        return Err(Error::GridTooCoarse { residual });
    }
    Ok(c * levy_integral(t, a, grid))
}

/// A tuple `(t₁, t₂, s₁, s₂)` failing one of the two-variable inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityViolation {
    pub tuple: (f64, f64, f64, f64),
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InequalityReport {
    pub samples: usize,
    /// Tuples skipped for the scaling check because a coordinate was zero.
    pub scaling_skipped: usize,
    pub max_scaling_excess: f64,
    pub max_subadditivity_excess: f64,
    pub scaling_violations: Vec<InequalityViolation>,
    pub subadditivity_violations: Vec<InequalityViolation>,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.scaling_violations.is_empty() && self.subadditivity_violations.is_empty()
    }
}

/// Checks, for a boundary-zero two-variable Bernstein function `g`:
///
/// - scaling: `g(t₁,t₂) ≤ max(1, t₁/s₁)·max(1, t₂/s₂)·g(s₁,s₂)` for positive tuples;
/// - subadditivity: `g(t₁+s₁, t₂+s₂) ≤ g(t₁,t₂) + g(t₁,s₂) + g(s₁,s₂) + g(s₁,t₂)`.
///
/// Excess beyond [`INEQUALITY_SLACK`] is recorded as a violation.
pub fn check_two_variable_inequalities(
    spec: &Bernstein2Spec,
    samples: &[(f64, f64, f64, f64)],
) -> Result<InequalityReport> {
    spec.validate()?;
    if !spec.is_zero_at_boundary() {
        return Err(Error::InvalidParameter("inequalities need a boundary-zero function".into()));
    }
    let g = |a: f64, b: f64| eval2_unchecked(spec, a, b);
    let mut report = InequalityReport { samples: samples.len(), ..Default::default() };
    for &tuple in samples {
        let (t1, t2, s1, s2) = tuple;
        if [t1, t2, s1, s2].iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("tuple {tuple:?} has negative entries")));
        }
        if t1 > 0.0 && t2 > 0.0 && s1 > 0.0 && s2 > 0.0 {
            let lhs = g(t1, t2)?;
            let rhs = (t1 / s1).max(1.0) * (t2 / s2).max(1.0) * g(s1, s2)?;
            let excess = lhs - rhs;
            report.max_scaling_excess = report.max_scaling_excess.max(excess);
            if excess > INEQUALITY_SLACK {
                report.scaling_violations.push(InequalityViolation { tuple, excess });
            }
        } else {
            report.scaling_skipped += 1;
        }
        let lhs = g(t1 + s1, t2 + s2)?;
        let rhs = g(t1, t2)? + g(t1, s2)? + g(s1, s2)? + g(s1, t2)?;
        let excess = lhs - rhs;
        report.max_subadditivity_excess = report.max_subadditivity_excess.max(excess);
        if excess > INEQUALITY_SLACK {
            report.subadditivity_violations.push(InequalityViolation { tuple, excess });
        }
    }
    Ok(report)
}
