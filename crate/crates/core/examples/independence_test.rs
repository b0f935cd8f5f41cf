//! Permutation independence test on a nonlinear, uncorrelated dependence.

use pdik::cnd::CndKernelSpec;
use pdik::independence::{permutation_test, PairedSample};
use pdik::pdi::PdiKernelSpec;
use pdik::special::Cm2Spec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pdik::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 80;
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    // y depends on x only through x², so Pearson correlation is near zero
    let y: Vec<f64> = x.iter().map(|v| v * v + 0.05 * rng.random_range(-1.0..1.0)).collect();
    let z: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();

    let sq = CndKernelSpec::squared_euclidean();
    let kernels = [
        PdiKernelSpec::kronecker(CndKernelSpec::euclidean(), CndKernelSpec::euclidean()),
        PdiKernelSpec::cm2(Cm2Spec::exponential(2.0)?, sq.clone(), sq),
    ];
    for spec in &kernels {
        println!("{}", spec.label());
        for (name, other) in [("x vs x²", &y), ("x vs noise", &z)] {
            let sample = PairedSample::from_scalars(&x, other)?;
            let r = permutation_test(spec, &sample, 499, 42)?;
            println!("  {name:<11} stat {:.4e}  p = {:.3}  ({:?} path)", r.statistic, r.p_value, r.path);
        }
    }
    Ok(())
}
