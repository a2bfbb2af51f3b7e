//! Small dense linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Smallest singular value; 0 for an empty matrix.
pub fn sigma_min(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solves `a · x = b` by partial-pivot LU; `None` if `a` is exactly singular.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.clone().lu().solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Induced ∞-norm: maximum absolute row sum.
pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Maximum absolute entry of `a - b`.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Row-major nested vectors, for serialization.
pub fn to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_min_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.5, 2.0]));
        assert!((sigma_min(&a) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn solve_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5]);
        let x = solve(&a, &[1.0, 1.5]).unwrap();
        assert!(max_abs_diff(&x, &[1.0, 2.0]) < 1e-14);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(solve(&singular, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn inf_norm_is_max_row_sum() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 0.25]);
        assert_eq!(inf_norm(&a), 3.0);
    }
}
