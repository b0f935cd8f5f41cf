//! Self-check suites behind `pdik bernstein-check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::special::{check_two_variable_inequalities, cm2_from_quadrature, Bernstein2Spec, QuadratureGrid};

pub const POWER32_POINTS: [f64; 4] = [0.25, 1.0, 4.0, 9.0];
pub const POWER32_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Power32Row {
    pub t: f64,
    pub quadrature: f64,
    pub exact: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Power32Report {
    pub rows: Vec<Power32Row>,
    pub max_relative_error: f64,
    pub passed: bool,
}

/// `t^{3/2}` from its integral representation against the closed form.
pub fn power32_suite(grid: &QuadratureGrid) -> Result<Power32Report> {
    let mut rows = Vec::new();
    for &t in &POWER32_POINTS {
        let quadrature = cm2_from_quadrature(t, 1.5, grid)?;
        let exact = t.powf(1.5);
        rows.push(Power32Row { t, quadrature, exact, relative_error: (quadrature - exact).abs() / exact });
    }
    let max_relative_error = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(Power32Report { rows, max_relative_error, passed: max_relative_error <= POWER32_TOL })
}

/// A mixture with 1 to 4 atoms, locations in `[0, 5]`, weights in `[0.1, 2]`.
pub fn random_mixture2<R: Rng>(rng: &mut R) -> Bernstein2Spec {
    let atoms = rng.random_range(1..=4);
    Bernstein2Spec::Mixture2(
        (0..atoms)
            .map(|_| (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0), rng.random_range(0.1..2.0)))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalitySuiteReport {
    pub specs: usize,
    pub tuples_per_spec: usize,
    pub scaling_violations: usize,
    pub subadditivity_violations: usize,
    pub max_scaling_excess: f64,
    pub max_subadditivity_excess: f64,
    pub bound_points: usize,
    pub bound_violations: usize,
    pub passed: bool,
}

/// Scaling and subadditivity over random mixtures and tuples, plus
/// `1/(1+s) ≤ (1 − e^{−s})/s` on a grid of `bound_points` values in `(0, 50]`.
pub fn inequality_suite(seed: u64, specs: usize, tuples: usize, bound_points: usize) -> Result<InequalitySuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = InequalitySuiteReport {
        specs,
        tuples_per_spec: tuples,
        scaling_violations: 0,
        subadditivity_violations: 0,
        max_scaling_excess: f64::NEG_INFINITY,
        max_subadditivity_excess: f64::NEG_INFINITY,
        bound_points,
        bound_violations: 0,
        passed: false,
    };
    for _ in 0..specs {
        let spec = random_mixture2(&mut rng);
        let samples: Vec<(f64, f64, f64, f64)> = (0..tuples)
            .map(|_| {
                (
                    rng.random_range(0.0..5.0),
                    rng.random_range(0.0..5.0),
                    rng.random_range(0.0..5.0),
                    rng.random_range(0.0..5.0),
                )
            })
            .collect();
        let report = check_two_variable_inequalities(&spec, &samples)?;
        out.scaling_violations += report.scaling_violations.len();
        out.subadditivity_violations += report.subadditivity_violations.len();
        out.max_scaling_excess = out.max_scaling_excess.max(report.max_scaling_excess);
        out.max_subadditivity_excess = out.max_subadditivity_excess.max(report.max_subadditivity_excess);
    }
    for i in 1..=bound_points {
        let s = 50.0 * i as f64 / bound_points as f64;
        let mid = -(-s).exp_m1() / s;
        if 1.0 / (1.0 + s) > mid + crate::special::INEQUALITY_SLACK || mid > 1.0 {
            out.bound_violations += 1;
        }
    }
    out.passed = out.scaling_violations == 0 && out.subadditivity_violations == 0 && out.bound_violations == 0;
    Ok(out)
}
