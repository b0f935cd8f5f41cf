//! Certify PD, CND and PDI properties of Gram matrices.
//!
//! ```bash
//! cargo run --example certify_kernels
//! ```

use pdik::certify::{certify, Constraint};
use pdik::cnd::{gram_cnd, schoenberg_pd, CndKernelSpec, PointSet};
use pdik::pdi::{gram_pdi, PdiKernelSpec, ProductGrid};
use pdik::special::{Bernstein1Spec, Bernstein2Spec};

fn main() -> pdik::Result<()> {
    let xs = PointSet::line(&[-1.0, 0.0, 0.5, 2.0])?;
    let ys = PointSet::euclidean(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.3, 0.8]])?;

    let euclid = CndKernelSpec::euclidean();
    let g = gram_cnd(&euclid, &xs)?;
    let r = certify(&g, Constraint::Cnd, 1e-8, false)?;
    println!("euclidean distance, CND: {:?} (min eigenvalue {:.3e})", r.verdict, r.min_constrained_eigenvalue);

    // a distance matrix is not PD, its Gaussian transform is
    let r = certify(&g, Constraint::Pd, 1e-8, false)?;
    println!("euclidean distance, PD: {:?}", r.verdict);
    let r = certify(&schoenberg_pd(&g, 0.7)?, Constraint::Pd, 1e-8, true)?;
    println!("exp(-0.7 d), PD strict: {:?}", r.verdict);

    let grid = ProductGrid::new(xs, ys);
    let g2 = Bernstein2Spec::ProductOfBernstein1(Bernstein1Spec::Log1p, Bernstein1Spec::Power(0.5));
    for spec in [
        PdiKernelSpec::kronecker(euclid.clone(), CndKernelSpec::squared_euclidean()),
        PdiKernelSpec::bernstein(g2, euclid.clone(), euclid.clone()).centered(),
    ] {
        let gram = gram_pdi(&spec, &grid)?;
        let r = certify(&gram, Constraint::Pdi { n: grid.n(), m: grid.m() }, 1e-8, false)?;
        println!(
            "{}: {:?}, constrained dimension {}, min {:.3e}",
            spec.label(),
            r.verdict,
            r.constraint_dimension,
            r.min_constrained_eigenvalue
        );
    }

    // identity minus a multiple of the only constrained direction on a 2x2 grid
    let v = nalgebra::DVector::from_column_slice(&[1.0, -1.0, -1.0, 1.0]);
    let bad = nalgebra::DMatrix::identity(4, 4) - &v * v.transpose() * 0.5;
    let r = certify(&bad, Constraint::Pdi { n: 2, m: 2 }, 1e-8, false)?;
    println!("I - vv'/2 on a 2x2 grid: {:?}, witness {:?}", r.verdict, r.witness);
    Ok(())
}
