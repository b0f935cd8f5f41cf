//! Small dense-matrix helpers shared by the kernel and statistic modules.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest `|a_ij - a_ji|` over the matrix. Zero for a 0x0 or 1x1 matrix.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn ensure_square(a: &DMatrix<f64>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Shape(format!("{what} must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    Ok(a.nrows())
}

/// Checks squareness and symmetry up to `tol` (absolute, scaled by the
/// largest entry when that exceeds one).
pub fn ensure_symmetric(a: &DMatrix<f64>, tol: f64, what: &str) -> Result<usize> {
    let n = ensure_square(a, what)?;
    let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let asym = max_asymmetry(a);
    if asym > tol * scale || asym.is_nan() {
        return Err(Error::NotSymmetric { max_asymmetry: asym });
    }
    Ok(n)
}

/// Fills a symmetric matrix by evaluating `f` once per unordered pair.
pub fn symmetric_from_fn<F>(n: usize, mut f: F) -> Result<DMatrix<f64>>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = f(i, j)?;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// slice length, so results are reproducible for a fixed input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Double centering `H A H` with `H = I - 11ᵀ/n`.
pub fn double_center(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let nf = n as f64;
    let row_means: Vec<f64> =
        (0..n).map(|i| pairwise_sum(&a.row(i).iter().copied().collect::<Vec<_>>()) / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| pairwise_sum(a.column(j).as_slice()) / nf).collect();
    let grand = pairwise_sum(&row_means) / nf;
    DMatrix::from_fn(n, n, |i, j| a[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// Frobenius inner product `Σ_ij a_ij b_ij`, summed row-major.
pub fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let mut terms = Vec::with_capacity(a.len());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            terms.push(a[(i, j)] * b[(i, j)]);
        }
    }
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn double_center_kills_row_and_column_sums() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 5.0, 7.0, 3.0, 7.0, 11.0]);
        let c = double_center(&a);
        for i in 0..3 {
            assert!(c.row(i).sum().abs() < 1e-12);
            assert!(c.column(i).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.5, 0.0]);
        assert!(matches!(ensure_symmetric(&a, 1e-12, "a"), Err(Error::NotSymmetric { .. })));
    }
}
