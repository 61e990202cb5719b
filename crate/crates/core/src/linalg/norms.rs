//! Classical matrix norms. Every norm short-circuits to exactly zero on the
//! zero matrix.

use super::eig::eigvalsh;
use super::matrix::{block_embed, Matrix};

/// Largest singular value, as the square root of the top eigenvalue of the
/// smaller Gram matrix.
pub fn operator_norm(x: &Matrix) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let gram = if x.rows() >= x.cols() {
        x.adjoint_mul(x).expect("shapes agree")
    } else {
        x * &x.adjoint()
    };
    let vals = eigvalsh(&gram.hermitian_part()).expect("Gram matrix is Hermitian");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Singular values in descending order, read off the spectrum of the block
/// embedding (whose eigenvalues are `+-sigma_i` padded with zeros).
pub fn singular_values(x: &Matrix) -> Vec<f64> {
    let k = x.rows().min(x.cols());
    if x.is_zero() {
        return vec![0.0; k];
    }
    let vals = eigvalsh(&block_embed(x)).expect("embedding is Hermitian");
    vals.iter().rev().take(k).map(|&v| v.max(0.0)).collect()
}

/// Sum of singular values.
pub fn trace_norm(x: &Matrix) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    singular_values(x).iter().sum()
}

/// Largest Euclidean column norm.
pub fn column_norm(x: &Matrix) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    (0..x.cols())
        .map(|j| (0..x.rows()).map(|i| x[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// `(max |x_ij|, sum |x_ij|)`.
pub fn entry_norms(x: &Matrix) -> (f64, f64) {
    if x.is_zero() {
        return (0.0, 0.0);
    }
    x.as_slice()
        .iter()
        .map(|z| z.norm())
        .fold((0.0, 0.0), |(m, s), a| (f64::max(m, a), s + a))
}
