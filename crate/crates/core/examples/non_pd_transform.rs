//! Nonconstant transforms of a PDI kernel are never PD, while the square
//! root of a centered PDI kernel satisfies a quadrangle inequality.

use pdik::cnd::{CndKernelSpec, PointSet};
use pdik::pdi::{nonconstant_transform_not_pd, sqrt_quadrangle_check, PdiKernelSpec, QuadrangleSample};
use pdik::special::Cm2Spec;

fn main() -> pdik::Result<()> {
    let spec = PdiKernelSpec::kronecker(CndKernelSpec::euclidean(), CndKernelSpec::euclidean()).centered();
    let xs = PointSet::line(&[0.0, 1.0])?;
    let ys = PointSet::line(&[0.0, 2.0])?;
    let (x, xp) = (xs.point(0), xs.point(1));
    let (y, yp) = (ys.point(0), ys.point(1));

    let transforms: [(&str, fn(f64) -> f64); 4] =
        [("exp(-t)", |t| (-t).exp()), ("t", |t| t), ("t^2", |t| t * t), ("constant", |_| 1.0)];
    for (name, f) in transforms {
        let r = nonconstant_transform_not_pd(f, &spec, (x, xp), (y, yp))?;
        println!("{name:<9} c = {:.3}  forms {:>8.4} / {:>8.4}  {:?}", r.kernel_value, r.form_v1, r.form_v2, r.verdict);
    }

    let centered =
        PdiKernelSpec::cm2(Cm2Spec::PowerA(1.5), CndKernelSpec::euclidean(), CndKernelSpec::euclidean()).centered();
    let samples: Vec<QuadrangleSample> = (0..200)
        .map(|i| {
            let f = i as f64;
            QuadrangleSample {
                x: vec![(f * 0.31).sin()],
                xp: vec![(f * 0.17).cos() * 2.0],
                z: vec![(f * 0.07).sin() - 0.5],
                y: vec![(f * 0.23).cos()],
                yp: vec![(f * 0.41).sin() * 1.5],
                w: vec![(f * 0.11).cos() + 0.2],
            }
        })
        .collect();
    let r = sqrt_quadrangle_check(&centered, &samples)?;
    println!("quadrangle check: {} samples, {} violations, max excess {:.3e}", r.samples, r.violations, r.max_excess);
    Ok(())
}
