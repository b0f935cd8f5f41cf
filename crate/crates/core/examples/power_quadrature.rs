//! `t^{3/2}` from its integral over exponentials, and the Gaussian mixture
//! representation of the `|x−x′|^{3/2}`-kernel statistic.

use pdik::independence::{intro_identity, PairedSample};
use pdik::special::{cm2_from_quadrature, power_levy_constant, QuadratureGrid};

fn main() -> pdik::Result<()> {
    let grid = QuadratureGrid::default();
    println!(
        "1/Gamma(-3/2) = {:.15} (3/(4 sqrt pi) = {:.15})",
        power_levy_constant(1.5),
        3.0 / (4.0 * std::f64::consts::PI.sqrt())
    );
    for t in [0.25, 1.0, 4.0, 9.0] {
        let q = cm2_from_quadrature(t, 1.5, &grid)?;
        let exact: f64 = t.powf(1.5);
        println!("t = {t:<5} quadrature {q:.10}  exact {exact:.10}  rel err {:.2e}", ((q - exact) / exact).abs());
    }

    let coarse = QuadratureGrid { nodes: 400, ..grid };
    match cm2_from_quadrature(4.0, 1.5, &coarse) {
        Ok(v) => println!("coarse grid, t = 4: {v:.10}"),
        Err(e) => println!("coarse grid refused: {e}"),
    }

    let x = [0.0, 0.3, 1.1, -0.7, 2.0, 0.5];
    let y = [0.2, 0.1, 1.5, -0.3, 1.4, 0.9];
    let id = intro_identity(&PairedSample::from_scalars(&x, &y)?, &grid)?;
    println!(
        "statistic {:.10}, integral {:.10}, relative residual {:.2e}",
        id.direct, id.integral, id.relative_residual
    );
    Ok(())
}
