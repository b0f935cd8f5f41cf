//! Centering a grid kernel, the base-point lift and the slice kernels.

use pdik::certify::{certify, quadratic_form, CoefficientGrid, Constraint};
use pdik::cnd::{CndKernelSpec, PointSet};
use pdik::pdi::{
    center_projections, gram_pdi, lift_base_point, max_projection, two_symmetry_residual, x_slice, PdiKernelSpec,
    ProductGrid,
};
use pdik::special::Cm2Spec;

fn main() -> pdik::Result<()> {
    let grid = ProductGrid::new(PointSet::line(&[0.0, 0.4, 1.3])?, PointSet::line(&[-1.0, 0.2, 0.9])?);
    let (n, m) = (grid.n(), grid.m());
    let spec = PdiKernelSpec::cm2(Cm2Spec::PowerA(1.5), CndKernelSpec::euclidean(), CndKernelSpec::euclidean());
    let g = gram_pdi(&spec, &grid)?;
    println!("raw projections: {:.3e}", max_projection(&g, n, m)?);

    let c = center_projections(&g, n, m)?;
    println!("centered projections: {:.3e}", max_projection(&c, n, m)?);
    println!("2-symmetry residual: {:.3e}", two_symmetry_residual(&c, n, m));

    let coef = CoefficientGrid::from_flat(n, m, &[1.0, -2.0, 1.0, -1.0, 1.0, 0.0, 0.0, 1.0, -1.0])?;
    println!("form before {:.12}, after {:.12}", quadratic_form(&g, &coef)?, quadratic_form(&c, &coef)?);

    for base in [(0, 0), (2, 1)] {
        let lifted = lift_base_point(&g, n, m, base)?;
        let r = certify(&lifted, Constraint::Pd, 1e-8, false)?;
        println!("lift at {base:?}: {:?} (min {:.3e})", r.verdict, r.min_constrained_eigenvalue);
    }

    let slice = x_slice(&c, n, m, 0, 2)?;
    let r = certify(&slice, Constraint::Cnd, 1e-9, false)?;
    println!("x-slice (y0, y2) is CND: {:?}", r.verdict);
    Ok(())
}
