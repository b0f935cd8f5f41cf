//! The same statistic through every evaluation path.

use pdik::cnd::CndKernelSpec;
use pdik::independence::{
    dcov_statistic, select_path, statistic_decomposed, statistic_direct, statistic_kronecker_fast, PairedSample,
};
use pdik::pdi::PdiKernelSpec;
use pdik::special::{Bernstein2Spec, Cm2Spec};

fn main() -> pdik::Result<()> {
    let x = [0.1, 0.9, -0.4, 1.7, 0.3, -1.2, 0.8, 0.0];
    let y = [0.3, 1.1, -0.2, 1.2, 0.9, -0.8, 0.1, 0.4];
    let sample = PairedSample::from_scalars(&x, &y)?;
    let e = CndKernelSpec::euclidean();

    let kron = PdiKernelSpec::kronecker(e.clone(), e.clone());
    println!("distance covariance");
    println!("  direct     {:.15e}", statistic_direct(&kron, &sample)?);
    println!("  kronecker  {:.15e}", statistic_kronecker_fast(&e, &e, &sample)?);
    println!("  dcov       {:.15e}", dcov_statistic(&kron, &sample)?);

    let mix = Bernstein2Spec::Mixture2(vec![(0.5, 1.0, 1.0), (2.0, 0.3, 0.25)]);
    let mixed = PdiKernelSpec::bernstein(mix, e.clone(), CndKernelSpec::squared_euclidean());
    let cm2 = PdiKernelSpec::cm2(Cm2Spec::PowerA(1.5), e.clone(), e);
    for spec in [mixed, cm2] {
        println!("{} (auto path {:?})", spec.label(), select_path(&spec));
        println!("  direct     {:.15e}", statistic_direct(&spec, &sample)?);
        match statistic_decomposed(&spec, &sample) {
            Ok(v) => println!("  decomposed {v:.15e}"),
            Err(err) => println!("  decomposed unavailable: {err}"),
        }
        println!("  dcov       {:.15e}", dcov_statistic(&spec, &sample)?);
    }
    Ok(())
}
