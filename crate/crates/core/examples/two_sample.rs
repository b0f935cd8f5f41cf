//! MMD and energy distance as quadratic forms with two-sample weights.

use pdik::cnd::{gram_cnd, schoenberg_pd, CndKernelSpec, PointSet};
use pdik::independence::{energy_distance_squared, mmd_squared, two_sample_weights};

fn main() -> pdik::Result<()> {
    let a = [0.0, 0.4, -0.3, 0.9, 0.1];
    let shifted: Vec<f64> = a.iter().map(|v| v + 1.0).collect();
    for (label, b) in [("same sample", a.to_vec()), ("shifted by 1", shifted)] {
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let pts = PointSet::line(&pooled)?;
        let w = two_sample_weights(a.len(), b.len())?;
        let gamma = gram_cnd(&CndKernelSpec::euclidean(), &pts)?;
        let gauss = schoenberg_pd(&gram_cnd(&CndKernelSpec::squared_euclidean(), &pts)?, 1.0)?;
        println!(
            "{label:<13} energy {:.6}  gaussian MMD^2 {:.6}",
            energy_distance_squared(&gamma, &w)?,
            mmd_squared(&gauss, &w)?
        );
    }
    Ok(())
}
