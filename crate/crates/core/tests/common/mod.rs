#![allow(dead_code)]

use nalgebra::DMatrix;
use pdik::cnd::{CndKernelSpec, CndKind, PointSet};
use pdik::pdi::{PdiKernelSpec, ProductGrid};
use pdik::special::{Bernstein1Spec, Bernstein2Spec, Cm2Spec, DiscreteMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn points<R: Rng>(rng: &mut R, n: usize, d: usize, sphere: bool) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            if sphere {
                let v: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.iter().map(|a| a / norm).collect()
            } else {
                (0..d).map(|_| rng.random_range(-1.5..1.5)).collect()
            }
        })
        .collect();
    if sphere {
        PointSet::sphere(&rows).unwrap()
    } else {
        PointSet::euclidean(&rows).unwrap()
    }
}

/// A random built-in CND kernel; geodesic only when `allow_sphere`.
pub fn cnd<R: Rng>(rng: &mut R, allow_sphere: bool, allow_offset: bool) -> CndKernelSpec {
    let choices = if allow_sphere { 4 } else { 3 };
    let kind = match rng.random_range(0..choices) {
        0 => CndKind::SquaredEuclidean,
        1 => CndKind::Euclidean,
        2 => CndKind::PowerDistance(rng.random_range(0.2..2.0)),
        _ => CndKind::SphereGeodesic,
    };
    let offset = if allow_offset && rng.random_bool(0.3) { rng.random_range(0.0..1.0) } else { 0.0 };
    CndKernelSpec { kind, diagonal_offset: offset }
}

pub fn bernstein1<R: Rng>(rng: &mut R) -> Bernstein1Spec {
    match rng.random_range(0..4) {
        0 => Bernstein1Spec::Linear(rng.random_range(0.1..2.0)),
        1 => Bernstein1Spec::Power(rng.random_range(0.1..1.0)),
        2 => Bernstein1Spec::Log1p,
        _ => Bernstein1Spec::ExpSaturate(rng.random_range(0.1..4.0)),
    }
}

pub fn mixture2<R: Rng>(rng: &mut R) -> Bernstein2Spec {
    let atoms = rng.random_range(1..=3);
    Bernstein2Spec::Mixture2(
        (0..atoms)
            .map(|_| {
                let r1 = if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.05..4.0) };
                let r2 = if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.05..4.0) };
                (r1, r2, rng.random_range(0.1..2.0))
            })
            .collect(),
    )
}

pub fn bernstein2<R: Rng>(rng: &mut R) -> Bernstein2Spec {
    match rng.random_range(0..3) {
        0 => mixture2(rng),
        1 => Bernstein2Spec::ProductOfBernstein1(bernstein1(rng), bernstein1(rng)),
        _ => Bernstein2Spec::BoundaryAugmented {
            core: Box::new(mixture2(rng)),
            left: bernstein1(rng),
            right: bernstein1(rng),
        },
    }
}

pub fn cm2_mixture<R: Rng>(rng: &mut R) -> Cm2Spec {
    let atoms = rng.random_range(1..=3);
    let mut list: Vec<(f64, f64)> = Vec::new();
    while list.len() < atoms {
        let r = rng.random_range(0.1..4.0);
        if list.iter().all(|(q, _)| (q - r).abs() > 1e-3) {
            list.push((r, rng.random_range(0.1..2.0)));
        }
    }
    Cm2Spec::Mixture {
        measure: DiscreteMeasure::new(list, false).unwrap(),
        a0: rng.random_range(-1.0..1.0),
        a1: rng.random_range(-1.0..1.0),
        a2: rng.random_range(0.0..1.0),
    }
}

pub fn cm2<R: Rng>(rng: &mut R) -> Cm2Spec {
    match rng.random_range(0..5) {
        0 => Cm2Spec::PowerA(rng.random_range(1.05..1.95)),
        1 => Cm2Spec::TLogT,
        2 => cm2_mixture(rng),
        3 => Cm2Spec::exponential(rng.random_range(0.1..3.0)).unwrap(),
        _ => Cm2Spec::Quadratic {
            a0: rng.random_range(-1.0..1.0),
            a1: rng.random_range(-1.0..1.0),
            a2: rng.random_range(0.1..1.0),
        },
    }
}

/// A random symbolic PDI kernel of family `family % 3` on a fresh grid.
pub fn pdi_config<R: Rng>(rng: &mut R, family: usize, n: usize, m: usize) -> (PdiKernelSpec, ProductGrid) {
    let dx = rng.random_range(1..=3);
    let dy = rng.random_range(1..=3);
    let gx = cnd(rng, dx >= 2, true);
    let gy = cnd(rng, dy >= 2, true);
    let xs = points(rng, n, dx, gx.kind == CndKind::SphereGeodesic);
    let ys = points(rng, m, dy, gy.kind == CndKind::SphereGeodesic);
    let spec = match family % 3 {
        0 => PdiKernelSpec::kronecker(gx, gy),
        1 => PdiKernelSpec::bernstein(bernstein2(rng), gx, gy),
        _ => PdiKernelSpec::cm2(cm2(rng), gx, gy),
    };
    let spec = if rng.random_bool(0.5) { spec.centered() } else { spec };
    (spec, ProductGrid::new(xs, ys))
}

pub fn random_symmetric<R: Rng>(rng: &mut R, size: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(size, size, |_, _| normal(rng));
    (&a + a.transpose()) * 0.5
}

/// A random `n × m` grid with zero row and column sums.
pub fn random_grid_values<R: Rng>(rng: &mut R, n: usize, m: usize) -> DMatrix<f64> {
    let mut c = DMatrix::from_fn(n, m, |_, _| normal(rng));
    for i in 0..n {
        let mean = c.row(i).sum() / m as f64;
        for k in 0..m {
            c[(i, k)] -= mean;
        }
    }
    for k in 0..m {
        let mean = c.column(k).sum() / n as f64;
        for i in 0..n {
            c[(i, k)] -= mean;
        }
    }
    c
}
