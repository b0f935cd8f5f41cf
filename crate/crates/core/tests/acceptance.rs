//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use pdik::certify::{certify, constraint_basis, quadratic_form, CoefficientGrid, Constraint, Verdict};
use pdik::cnd::{schoenberg_pd, CndKernelSpec, PointSet};
use pdik::independence::{
    dcov_statistic, permutation_test, statistic_decomposed, statistic_direct, statistic_kronecker_fast, PairedSample,
};
use pdik::pdi::{
    center_projections, eval_pdi, gram_pdi, lift_base_point, max_projection, nonconstant_transform_not_pd,
    rkhs_identity_residual, x_slice, y_slice, PdiFamily, PdiKernelSpec, ProductGrid, TransformVerdict,
};
use pdik::special::{
    bernstein2_eval, check_two_variable_inequalities, cm2_from_quadrature, Cm2Spec, QuadratureGrid, INEQUALITY_SLACK,
};
use rand::Rng;

use common::*;

const EIGEN_TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

fn lift_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let mut genuine = 0;
    let mut corrupted = 0;
    let mut disagreements = Vec::new();
    let mut record = |label: String, g: &DMatrix<f64>, n: usize, m: usize, base: (usize, usize), expect: Verdict| {
        let direct = certify(g, Constraint::Pdi { n, m }, EIGEN_TOL, false).unwrap();
        let lifted = certify(&lift_base_point(g, n, m, base).unwrap(), Constraint::Pd, EIGEN_TOL, false).unwrap();
        if direct.verdict != lifted.verdict || direct.verdict != expect {
            disagreements.push(format!(
                "{label}: pdi {:?} ({:e}), lift {:?} ({:e})",
                direct.verdict, direct.min_constrained_eigenvalue, lifted.verdict, lifted.min_constrained_eigenvalue
            ));
        }
    };
    for c in 0..200 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(2..=4);
        let (spec, grid) = pdi_config(&mut rng, c, n, m);
        let g = gram_pdi(&spec, &grid).unwrap();
        let base = (rng.random_range(0..n), rng.random_range(0..m));
        record(spec.label(), &g, n, m, base, Verdict::Certified);
        genuine += 1;
    }
    for c in 0..20 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(2..=4);
        let (spec, grid) = pdi_config(&mut rng, c, n, m);
        let mut g = gram_pdi(&spec, &grid).unwrap();
        // push one constrained direction negative
        let b = constraint_basis(n, m);
        let u = DMatrix::from_fn(b.ncols(), 1, |_, _| normal(&mut rng));
        let v = &b * (&u / u.norm());
        let form = (v.transpose() * &g * &v)[(0, 0)];
        let s = 2.0 * form.abs() + 1.0;
        g -= &v * v.transpose() * s;
        let g = (&g + g.transpose()) * 0.5;
        let base = (rng.random_range(0..n), rng.random_range(0..m));
        record(format!("corrupted {}", spec.label()), &g, n, m, base, Verdict::Rejected);
        corrupted += 1;
    }
    ensure(disagreements.is_empty(), || format!("{} mismatches, first: {}", disagreements.len(), disagreements[0]))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("{genuine} PDI + {corrupted} corrupted configs agree, {:.2} s", start.elapsed().as_secs_f64()))
}

fn centering_conservation() -> Outcome {
    let mut rng = rng(202);
    let mut worst_rel = 0.0_f64;
    let mut worst_proj = 0.0_f64;
    for c in 0..100 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(2..=4);
        let g = if c % 2 == 0 {
            random_symmetric(&mut rng, n * m)
        } else {
            let (spec, grid) = pdi_config(&mut rng, c, n, m);
            gram_pdi(&spec, &grid).unwrap()
        };
        let centered = center_projections(&g, n, m).unwrap();
        let scale = g.amax().max(1.0);
        worst_proj = worst_proj.max(max_projection(&centered, n, m).unwrap() / scale);
        for _ in 0..20 {
            let coef = CoefficientGrid::new(random_grid_values(&mut rng, n, m)).unwrap();
            let a = quadratic_form(&g, &coef).unwrap();
            let b = quadratic_form(&centered, &coef).unwrap();
            worst_rel = worst_rel.max(rel(a, b));
        }
    }
    ensure(worst_rel <= 1e-9, || format!("quadratic forms differ by {worst_rel:e} relative"))?;
    ensure(worst_proj <= 1e-10, || format!("projection kernels reach {worst_proj:e}"))?;
    Ok(format!("2000 forms, max relative change {worst_rel:.1e}, max projection {worst_proj:.1e}"))
}

fn rkhs_identity() -> Outcome {
    let mut rng = rng(303);
    let mut worst = [0.0_f64; 2];
    for (fam, label) in [(0usize, "mixture2"), (1, "cm2")] {
        for _batch in 0..10 {
            let dx = rng.random_range(1..=3);
            let dy = rng.random_range(1..=3);
            let grid = ProductGrid::new(points(&mut rng, 3, dx, false), points(&mut rng, 3, dy, false));
            let spec = if fam == 0 {
                let s = PdiKernelSpec::bernstein(
                    mixture2(&mut rng),
                    cnd(&mut rng, false, false),
                    cnd(&mut rng, false, false),
                );
                if rng.random_bool(0.5) {
                    s.centered()
                } else {
                    s
                }
            } else {
                PdiKernelSpec::cm2(cm2(&mut rng), cnd(&mut rng, false, true), cnd(&mut rng, false, true)).centered()
            };
            let pairs: Vec<_> = (0..10)
                .map(|_| {
                    ((rng.random_range(0..3), rng.random_range(0..3)), (rng.random_range(0..3), rng.random_range(0..3)))
                })
                .collect();
            let base = (rng.random_range(0..3), rng.random_range(0..3));
            let r = rkhs_identity_residual(&spec, &grid, &pairs, base).map_err(|e| format!("{label}: {e}"))?;
            worst[fam] = worst[fam].max(r.max_residual).max(r.max_two_symmetric_residual);
        }
    }
    ensure(worst[0] <= 1e-8 && worst[1] <= 1e-8, || format!("residuals {:e} / {:e}", worst[0], worst[1]))?;
    Ok(format!("200 pairs, max residual mixture2 {:.1e}, cm2 {:.1e}", worst[0], worst[1]))
}

/// Samples of moderate dependence, `n ∈ [5, 20]`.
fn random_sample<R: Rng>(rng: &mut R, sphere_y: bool) -> PairedSample {
    let n = rng.random_range(5..=20);
    let dx = rng.random_range(1..=3);
    let dy = if sphere_y { rng.random_range(2..=3) } else { rng.random_range(1..=3) };
    let xs = points(rng, n, dx, false);
    let dependence = rng.random_range(0.0..1.0);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let v: Vec<f64> = (0..dy).map(|k| dependence * xs.row(i)[k % dx] + normal(rng)).collect();
            if sphere_y {
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.iter().map(|a| a / norm).collect()
            } else {
                v
            }
        })
        .collect();
    let ys = if sphere_y { PointSet::sphere(&rows).unwrap() } else { PointSet::euclidean(&rows).unwrap() };
    PairedSample::new(xs, ys).unwrap()
}

fn path_equality(direct_values: &mut Vec<f64>) -> Outcome {
    let start = Instant::now();
    let mut rng = rng(404);
    let mut worst = 0.0_f64;
    let mut runs = 0;
    let mut failure = None;
    for family in 0..10 {
        for _ in 0..50 {
            let sphere_y = family == 0 && rng.random_bool(0.3);
            let sample = random_sample(&mut rng, sphere_y);
            let gy = if sphere_y { CndKernelSpec::sphere_geodesic() } else { cnd(&mut rng, false, true) };
            let gx = cnd(&mut rng, false, true);
            let spec = match family {
                0 => PdiKernelSpec::kronecker(gx, gy),
                1 => PdiKernelSpec::bernstein(mixture2(&mut rng), gx, gy),
                2 => PdiKernelSpec::bernstein(
                    pdik::special::Bernstein2Spec::ProductOfBernstein1(bernstein1(&mut rng), bernstein1(&mut rng)),
                    gx,
                    gy,
                ),
                3 => PdiKernelSpec::bernstein(bernstein2(&mut rng), gx, gy).centered(),
                4 => PdiKernelSpec::cm2(cm2_mixture(&mut rng), gx, gy),
                5 => PdiKernelSpec::cm2(
                    Cm2Spec::Quadratic {
                        a0: rng.random_range(-1.0..1.0),
                        a1: rng.random_range(-1.0..1.0),
                        a2: rng.random_range(0.1..1.0),
                    },
                    gx,
                    gy,
                ),
                6 => PdiKernelSpec::cm2(Cm2Spec::exponential(rng.random_range(0.1..3.0)).unwrap(), gx, gy),
                7 => PdiKernelSpec::cm2(Cm2Spec::PowerA(rng.random_range(1.05..1.95)), gx, gy),
                8 => PdiKernelSpec::cm2(Cm2Spec::TLogT, gx, gy),
                _ => PdiKernelSpec::kronecker(gx, gy).centered(),
            };
            let direct = statistic_direct(&spec, &sample).unwrap();
            direct_values.push(direct);
            let mut others = vec![("dcov", dcov_statistic(&spec, &sample).unwrap())];
            match &spec.family {
                PdiFamily::Kronecker { x, y } => {
                    others.push(("kronecker", statistic_kronecker_fast(x, y, &sample).unwrap()))
                }
                PdiFamily::Cm2Compose { psi: Cm2Spec::PowerA(_) | Cm2Spec::TLogT, .. } => {}
                PdiFamily::Cm2Compose { psi: Cm2Spec::Quadratic { a2, .. }, x, y } => {
                    others.push(("decomposed", statistic_decomposed(&spec, &sample).unwrap()));
                    others.push(("2a2·kronecker", 2.0 * a2 * statistic_kronecker_fast(x, y, &sample).unwrap()));
                }
                _ => others.push(("decomposed", statistic_decomposed(&spec, &sample).unwrap())),
            }
            for (name, v) in others {
                let r = rel(direct, v);
                worst = worst.max(r);
                if r > 1e-8 && failure.is_none() {
                    failure = Some(format!("{}: direct {direct:e} vs {name} {v:e} (n={})", spec.label(), sample.n()));
                }
            }
            runs += 1;
        }
    }
    if let Some(f) = failure {
        return Err(f);
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("{runs} samples over 10 families, max relative gap {worst:.1e}, {:.2} s", start.elapsed().as_secs_f64()))
}

fn power_quadrature() -> Outcome {
    let grid = QuadratureGrid::default();
    let mut worst = 0.0_f64;
    for t in [0.25, 1.0, 4.0, 9.0] {
        let v = cm2_from_quadrature(t, 1.5, &grid).map_err(|e| e.to_string())?;
        worst = worst.max(((v - t.powf(1.5)) / t.powf(1.5)).abs());
    }
    ensure(worst <= 1e-5, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e} at t in {{0.25, 1, 4, 9}}"))
}

fn bernstein_inequalities() -> Outcome {
    let mut rng = rng(606);
    let mut brute_violations = 0;
    let mut checker_violations = 0;
    for _ in 0..10 {
        let spec = mixture2(&mut rng);
        let tuples: Vec<(f64, f64, f64, f64)> = (0..1000)
            .map(|_| {
                (
                    rng.random_range(0.0..6.0),
                    rng.random_range(0.0..6.0),
                    rng.random_range(0.0..6.0),
                    rng.random_range(0.0..6.0),
                )
            })
            .collect();
        let g = |a: f64, b: f64| bernstein2_eval(&spec, a, b).unwrap();
        for &(t1, t2, s1, s2) in &tuples {
            if t1 > 0.0 && t2 > 0.0 && s1 > 0.0 && s2 > 0.0 {
                let bound = (t1 / s1).max(1.0) * (t2 / s2).max(1.0) * g(s1, s2);
                if g(t1, t2) > bound + INEQUALITY_SLACK {
                    brute_violations += 1;
                }
            }
            let sum = g(t1, t2) + g(t1, s2) + g(s1, s2) + g(s1, t2);
            if g(t1 + s1, t2 + s2) > sum + INEQUALITY_SLACK {
                brute_violations += 1;
            }
        }
        let report = check_two_variable_inequalities(&spec, &tuples).unwrap();
        checker_violations += report.scaling_violations.len() + report.subadditivity_violations.len();
    }
    let mut bound_violations = 0;
    for i in 1..=10_000 {
        let s = 50.0 * i as f64 / 10_000.0;
        let mid = -(-s).exp_m1() / s;
        if 1.0 / (1.0 + s) > mid || mid > 1.0 {
            bound_violations += 1;
        }
    }
    ensure(brute_violations == 0 && checker_violations == 0 && bound_violations == 0, || {
        format!("violations: brute {brute_violations}, checker {checker_violations}, bound {bound_violations}")
    })?;
    Ok("10 mixtures x 1000 tuples and 10^4-point bound grid, 0 violations".into())
}

fn nonpd_transform() -> Outcome {
    let mut rng = rng(707);
    let fs: [(&str, fn(f64) -> f64); 3] = [("exp(-t)", |t| (-t).exp()), ("t", |t| t), ("t^2", |t| t * t)];
    let mut witnesses = 0;
    for c in 0..60 {
        let (spec, grid) = pdi_config(&mut rng, c, 2, 2);
        let spec = spec.centered();
        let (x, xp) = (grid.xs.point(0), grid.xs.point(1));
        let (y, yp) = (grid.ys.point(0), grid.ys.point(1));
        let value = eval_pdi(&spec, (x, y), (xp, yp)).unwrap();
        if value.abs() <= 1e-9 {
            continue;
        }
        witnesses += 1;
        for (name, f) in fs {
            let r = nonconstant_transform_not_pd(f, &spec, (x, xp), (y, yp)).unwrap();
            ensure(r.verdict == TransformVerdict::NotPd, || format!("{name} on {}: {r:?}", spec.label()))?;
        }
        let r = nonconstant_transform_not_pd(|_| 1.5, &spec, (x, xp), (y, yp)).unwrap();
        ensure(r.verdict == TransformVerdict::Inconclusive, || format!("constant on {}: {r:?}", spec.label()))?;
    }
    ensure(witnesses >= 50, || format!("only {witnesses} usable witnesses"))?;
    Ok(format!("{witnesses} witnesses x 3 transforms NotPd, constant Inconclusive"))
}

fn slice_cnd() -> Outcome {
    let mut rng = rng(808);
    let mut slices = 0;
    for c in 0..100 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(2..=4);
        let (spec, grid) = pdi_config(&mut rng, c, n, m);
        let spec = spec.centered();
        ensure(spec.is_two_symmetric(), || "symbolic kernel not 2-symmetric".into())?;
        let g = gram_pdi(&spec, &grid).unwrap();
        let mut mats = Vec::new();
        for k in 0..m {
            for l in 0..m {
                mats.push(x_slice(&g, n, m, k, l).unwrap());
            }
        }
        for i in 0..n {
            for j in 0..n {
                mats.push(y_slice(&g, n, m, i, j).unwrap());
            }
        }
        for s in mats {
            let r = certify(&s, Constraint::Cnd, 1e-9, false).map_err(|e| format!("{}: {e}", spec.label()))?;
            ensure(r.verdict.passes(), || {
                format!("{}: slice min eigenvalue {:e}", spec.label(), r.min_constrained_eigenvalue)
            })?;
            slices += 1;
        }
    }
    Ok(format!("{slices} slices from 100 configs certified CND"))
}

fn gaussian_spec(r: f64) -> PdiKernelSpec {
    let sq = CndKernelSpec::squared_euclidean();
    PdiKernelSpec::cm2(Cm2Spec::exponential(r).unwrap(), sq.clone(), sq)
}

const GAUSS_RATE: f64 = 0.5;

fn criterion9_samples() -> (PairedSample, PairedSample) {
    let mut rng = rng(909);
    let x: Vec<f64> = (0..100).map(|_| normal(&mut rng)).collect();
    let dep: Vec<f64> = x.iter().map(|v| v + 0.01 * normal(&mut rng)).collect();
    let ind: Vec<f64> = (0..100).map(|_| normal(&mut rng)).collect();
    (PairedSample::from_scalars(&x, &dep).unwrap(), PairedSample::from_scalars(&x, &ind).unwrap())
}

fn statistical_sanity() -> Outcome {
    // the composed kernel is the Schoenberg transform of γ + ς
    let grid = ProductGrid::new(PointSet::line(&[0.0, 0.7, 1.5]).unwrap(), PointSet::line(&[-0.3, 0.4]).unwrap());
    let sum_gram = gram_pdi(
        &PdiKernelSpec::cm2(
            Cm2Spec::Quadratic { a0: 0.0, a1: 1.0, a2: 0.0 },
            CndKernelSpec::squared_euclidean(),
            CndKernelSpec::squared_euclidean(),
        ),
        &grid,
    )
    .unwrap();
    let schoenberg = schoenberg_pd(&sum_gram, GAUSS_RATE).unwrap();
    let composed = gram_pdi(&gaussian_spec(GAUSS_RATE), &grid).unwrap();
    ensure((schoenberg - composed).amax() < 1e-12, || "composed kernel differs from Schoenberg transform".into())?;

    let start = Instant::now();
    let (dep, ind) = criterion9_samples();
    let spec = gaussian_spec(GAUSS_RATE);
    let rd = permutation_test(&spec, &dep, 199, 2024).unwrap();
    let ri = permutation_test(&spec, &ind, 199, 2024).unwrap();
    let elapsed = start.elapsed();
    ensure(rd.p_value <= 0.05, || format!("dependent p = {}", rd.p_value))?;
    ensure(ri.p_value >= 0.10, || format!("independent p = {}", ri.p_value))?;
    within(elapsed, 20.0)?;
    Ok(format!("dependent p = {:.4}, independent p = {:.4}, {:.2} s", rd.p_value, ri.p_value, elapsed.as_secs_f64()))
}

fn nonnegativity(direct_values: &[f64]) -> Outcome {
    let (dep, ind) = criterion9_samples();
    let spec = gaussian_spec(GAUSS_RATE);
    let mut all = direct_values.to_vec();
    all.push(statistic_direct(&spec, &dep).unwrap());
    all.push(statistic_direct(&spec, &ind).unwrap());
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(all.len() >= 500, || format!("only {} runs", all.len()))?;
    ensure(min >= -1e-10, || format!("minimum statistic {min:e}"))?;
    Ok(format!("{} direct statistics, minimum {min:.3e}", all.len()))
}

fn main() {
    let mut direct_values = Vec::new();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(&mut *f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {id:>2} {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {id:>2} {name}: {detail} [{secs:.2} s]");
            }
        }
    };
    report(1, "lift equivalence", &mut lift_equivalence);
    report(2, "centering conservation", &mut centering_conservation);
    report(3, "RKHS quadrangle identity", &mut rkhs_identity);
    report(4, "statistic path equality", &mut || path_equality(&mut direct_values));
    report(5, "t^(3/2) quadrature", &mut power_quadrature);
    report(6, "two-variable Bernstein inequalities", &mut bernstein_inequalities);
    report(7, "non-PD transform counterexample", &mut nonpd_transform);
    report(8, "slice CND property", &mut slice_cnd);
    report(9, "statistical sanity", &mut statistical_sanity);
    let values = direct_values.clone();
    report(10, "nonnegativity sweep", &mut || nonnegativity(&values));
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
