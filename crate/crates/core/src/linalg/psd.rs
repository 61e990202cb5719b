//! Functional calculus on positive semidefinite matrices and Cholesky
//! factorizations used by the barrier solvers.

use num_complex::Complex64;

use super::eig::herm_eig;
use super::matrix::{Matrix, ZERO};
use crate::error::{Error, Result};

/// Hermitian PSD square root. Eigenvalues in `[-tol * (1 + lambda_max), 0)`
/// are clamped to zero; anything lower is an error.
pub fn psd_sqrt(p: &Matrix, tol: f64) -> Result<Matrix> {
    if p.is_zero() {
        p.check_hermitian()?;
        return Ok(p.clone());
    }
    let e = herm_eig(p)?;
    let band = tol * (1.0 + e.max().max(0.0));
    if e.min() < -band {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.reconstruct_with(|v| v.max(0.0).sqrt()))
}

/// Inverse square root on the span of eigenvalues above
/// `supp_tol * lambda_max`, zero on the complement.
pub fn pinv_sqrt(p: &Matrix, supp_tol: f64) -> Result<Matrix> {
    if p.is_zero() {
        p.check_hermitian()?;
        return Ok(p.clone());
    }
    let e = herm_eig(p)?;
    let cut = supp_tol * e.max().max(0.0);
    Ok(e.reconstruct_with(|v| if v > cut && v > 0.0 { 1.0 / v.sqrt() } else { 0.0 }))
}

/// Orthogonal projection onto the span of eigenvalues above
/// `supp_tol * lambda_max`.
pub fn support_projection(p: &Matrix, supp_tol: f64) -> Result<Matrix> {
    if p.is_zero() {
        p.check_hermitian()?;
        return Ok(p.clone());
    }
    let e = herm_eig(p)?;
    let cut = supp_tol * e.max().max(0.0);
    Ok(e.reconstruct_with(|v| if v > cut && v > 0.0 { 1.0 } else { 0.0 }))
}

/// Lower-triangular `L` with `L L* = A` for Hermitian positive definite `A`.
/// Only the lower triangle of `A` is read. `None` if a pivot is not
/// strictly positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !d.is_finite() || d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// `log det A` from a Cholesky factor.
pub fn cholesky_logdet(l: &Matrix) -> f64 {
    (0..l.rows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

/// `A^{-1}` from the Cholesky factor of `A`. The result is exactly Hermitian.
pub fn cholesky_inverse(l: &Matrix) -> Matrix {
    let n = l.rows();
    // Invert L (lower triangular) column by column.
    let mut linv = Matrix::zeros(n, n);
    for j in 0..n {
        linv[(j, j)] = l[(j, j)].inv();
        for i in (j + 1)..n {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = -s / l[(i, i)];
        }
    }
    // A^{-1} = L^{-*} L^{-1}
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = ZERO;
            for k in i..n {
                s += linv[(k, i)].conj() * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s.conj();
        }
        inv[(i, i)].im = 0.0;
    }
    inv
}

/// Cholesky for dense real symmetric positive definite systems, in place
/// on a row-major `n x n` buffer. Returns `false` on a non-positive pivot.
pub(crate) fn real_cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !d.is_finite() || d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

/// Solves `L L^T x = b` given the factor from [`real_cholesky`].
pub(crate) fn real_cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    #[test]
    fn sqrt_examples() {
        let s = psd_sqrt(&Matrix::from_real_diag(&[4.0, 9.0]), 1e-12).unwrap();
        assert!(s.max_abs_diff(&Matrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
        let i3 = Matrix::identity(3);
        assert!(psd_sqrt(&i3, 1e-12).unwrap().max_abs_diff(&i3) < 1e-15);

        let p = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = psd_sqrt(&p, 1e-12).unwrap();
        assert!((&s * &s).max_abs_diff(&p) < 1e-10);
    }

    #[test]
    fn sqrt_rejects_indefinite_but_clamps_roundoff() {
        let bad = Matrix::from_real_diag(&[1.0, -0.1]);
        assert!(matches!(psd_sqrt(&bad, 1e-9), Err(Error::NotPsd { .. })));
        let roundoff = Matrix::from_real_diag(&[1.0, -1e-12]);
        let s = psd_sqrt(&roundoff, 1e-9).unwrap();
        assert_eq!(s[(1, 1)].re, 0.0);
    }

    #[test]
    fn pinv_sqrt_examples() {
        let r = pinv_sqrt(&Matrix::from_real_diag(&[4.0, 0.0]), 1e-12).unwrap();
        assert!(r.max_abs_diff(&Matrix::from_real_diag(&[0.5, 0.0])) < 1e-15);
        let i2 = Matrix::identity(2);
        assert!(pinv_sqrt(&i2, 1e-12).unwrap().max_abs_diff(&i2) < 1e-15);
        assert!(pinv_sqrt(&Matrix::zeros(3, 3), 1e-12).unwrap().is_zero());
    }

    #[test]
    fn random_psd_identities() {
        let mut rng = sampling::seeded(3);
        for _ in 0..200 {
            let n = 1 + (rand::Rng::random_range(&mut rng, 0..8usize));
            let rank = 1 + (rand::Rng::random_range(&mut rng, 0..n));
            let g = sampling::general(&mut rng, n, rank);
            let p = (&g * &g.adjoint()).hermitian_part();
            let s = psd_sqrt(&p, 1e-9).unwrap();
            assert!((&s * &s).frobenius_dist(&p) <= 1e-9 * (1.0 + p.frobenius_norm()));
            let r = pinv_sqrt(&p, 1e-10).unwrap();
            let q = support_projection(&p, 1e-10).unwrap();
            let rpr = &(&r * &p) * &r;
            assert!(rpr.max_abs_diff(&q) < 1e-7, "{}", rpr.max_abs_diff(&q));
        }
    }

    #[test]
    fn cholesky_inverse_roundtrip() {
        let mut rng = sampling::seeded(5);
        let g = sampling::general(&mut rng, 5, 5);
        let a = (&g * &g.adjoint()).shift_diag(0.5).hermitian_part();
        let l = cholesky(&a).unwrap();
        assert!((&l * &l.adjoint()).max_abs_diff(&a) < 1e-12);
        let inv = cholesky_inverse(&l);
        assert!((&inv * &a).max_abs_diff(&Matrix::identity(5)) < 1e-10);
        let e = herm_eig(&a).unwrap();
        let logdet: f64 = e.values.iter().map(|v| v.ln()).sum();
        assert!((cholesky_logdet(&l) - logdet).abs() < 1e-10);
        assert!(cholesky(&Matrix::from_real_diag(&[1.0, 0.0])).is_none());
    }

    #[test]
    fn real_cholesky_solves() {
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        assert!(real_cholesky(&mut a, 2));
        let mut b = vec![2.0, 1.0];
        real_cholesky_solve(&a, 2, &mut b);
        // [[4,2],[2,3]] x = [2,1] -> x = [0.5, 0]
        assert!((b[0] - 0.5).abs() < 1e-15 && b[1].abs() < 1e-15);
        let mut s = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!real_cholesky(&mut s, 2));
    }
}
