//! Factorizations read off optimal witnesses.

use log::debug;

use super::{cbb_norm, check_tol, schur_norm, CbbMethod, SchurMethod};
use crate::engines::solve_program_p;
use crate::error::{Error, Result};
use crate::linalg::{block_embed, column_norm, eigvalsh, operator_norm, pinv_sqrt, psd_sqrt, Matrix, ZERO};

/// `lambda_j <= SUPPORT_TOL * Tr(lambda)` counts as outside the support.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Relative (to `||X||_F`) size a row or column of `X` may have off the
/// support of `lambda`.
const OFF_SUPPORT_COLUMN_TOL: f64 = 1e-7;
/// Relative eigenvalue cutoff for the support of `P` in `sqrt(P)^+`.
const PSEUDO_INVERSE_TOL: f64 = 1e-12;
/// Reconstruction tolerance, relative to `1 + ||X||_F`.
const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Factorizations solve this much tighter than the requested tolerance:
/// `xi` depends on `lambda` like a square root, and a barrier iterate keeps
/// coordinates outside the support at `O(mu)` rather than 0.
const REFINEMENT: f64 = 1e-2;

/// `X = Delta(eta) B Delta(xi)` with unit nonnegative `eta`, `xi` and
/// `||B||_inf = ||X||_cbB`.
#[derive(Debug, Clone)]
pub struct CbbFactorization {
    pub eta: Vec<f64>,
    pub xi: Vec<f64>,
    pub b: Matrix,
    /// `||X||_cbB` as computed by the engine used.
    pub value: f64,
    /// `||B||_inf`.
    pub b_norm: f64,
}

impl CbbFactorization {
    pub fn reconstruct(&self) -> Matrix {
        Matrix::from_fn(self.b.rows(), self.b.cols(), |i, j| {
            self.b[(i, j)] * (self.eta[i] * self.xi[j])
        })
    }
}

/// `X = L* R` with `||L||_c ||R||_c = ||X||_S`.
#[derive(Debug, Clone)]
pub struct SchurFactorization {
    /// `2n x n`.
    pub l: Matrix,
    /// `2n x n`.
    pub r: Matrix,
    /// `||X||_S`.
    pub value: f64,
}

/// Unit vector `sqrt(lambda / sum lambda)`, zero off the support. Checks
/// that the matching lines of `x` vanish; `lines(j)` returns line `j`'s norm.
fn support_unit_vector(
    lambda: &[f64],
    trace: f64,
    offset: usize,
    lines: impl Fn(usize) -> f64,
    x_norm: f64,
) -> Result<Vec<f64>> {
    let total: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
    lambda
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            if l <= SUPPORT_TOL * trace {
                let norm = lines(j);
                if norm > OFF_SUPPORT_COLUMN_TOL * x_norm {
                    return Err(Error::SupportViolation {
                        index: offset + j,
                        norm,
                    });
                }
                Ok(0.0)
            } else {
                Ok((l / total).sqrt())
            }
        })
        .collect()
}

fn row_norm(x: &Matrix, i: usize) -> f64 {
    x.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn col_norm(x: &Matrix, j: usize) -> f64 {
    x.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Optimal diagonal for `x` from the requested engine, with the norm value
/// and whether it lives on the block embedding.
fn optimal_lambda(x: &Matrix, method: CbbMethod, tol: f64) -> Result<(Vec<f64>, f64, bool)> {
    match method {
        CbbMethod::CuttingPlane => {
            let selfadjoint = x.is_hermitian();
            let target = if selfadjoint {
                x.hermitian_part()
            } else {
                block_embed(x)
            };
            let s = solve_program_p(&target, REFINEMENT * tol)?;
            let lambda = s.certificate_lambda(&target).0;
            let value = if selfadjoint { s.value } else { 0.5 * s.value };
            Ok((lambda, value, !selfadjoint))
        }
        // The diagonal fast path's witness is exactly optimal as well.
        CbbMethod::Auto | CbbMethod::Sdp => {
            let r = cbb_norm(x, method, REFINEMENT * tol)?;
            Ok((r.witness.diag_re(), r.value, r.embedded))
        }
    }
}

/// [`cbb_factorization_with`] using the barrier SDP.
pub fn cbb_factorization(x: &Matrix, tol: f64) -> Result<CbbFactorization> {
    cbb_factorization_with(x, CbbMethod::Sdp, tol)
}

/// Factorization `X = Delta(eta) B Delta(xi)` with `||B||_inf = ||X||_cbB`,
/// read off an optimal `lambda`.
///
/// Self-adjoint `X`: `eta = xi = sqrt(lambda / Tr lambda)`. Otherwise, on the
/// block embedding, `eta` and `xi` normalize the first `m` and last `n`
/// coordinates of `lambda` separately. `B_ij = X_ij / (eta_i xi_j)` on the
/// supports and 0 elsewhere. Reconstruction and `||B||_inf <= value (1 + tol)`
/// are verified before returning (`sqrt(tol)` in place of `tol` for the
/// cutting-plane engine, whose `lambda` is only approximately feasible).
pub fn cbb_factorization_with(x: &Matrix, method: CbbMethod, tol: f64) -> Result<CbbFactorization> {
    check_tol(tol)?;
    if x.is_zero() {
        return Err(Error::InvalidArgument(
            "the zero matrix has no normalized factorization".into(),
        ));
    }
    let (m, n) = x.shape();
    let x_norm = x.frobenius_norm();
    let (lambda, value, embedded) = optimal_lambda(x, method, tol)?;
    let trace: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
    let (eta, xi) = if embedded {
        let eta = support_unit_vector(&lambda[..m], trace, 0, |i| row_norm(x, i), x_norm)?;
        let xi = support_unit_vector(&lambda[m..], trace, m, |j| col_norm(x, j), x_norm)?;
        let top: f64 = lambda[..m].iter().sum();
        debug!("factorization trace split {:.6} / {:.6}", top, trace - top);
        (eta, xi)
    } else {
        let xi = support_unit_vector(&lambda, trace, 0, |j| col_norm(x, j), x_norm)?;
        (xi.clone(), xi)
    };
    let b = Matrix::from_fn(m, n, |i, j| {
        if eta[i] > 0.0 && xi[j] > 0.0 {
            x[(i, j)] / (eta[i] * xi[j])
        } else {
            ZERO
        }
    });
    let f = CbbFactorization {
        b_norm: operator_norm(&b),
        eta,
        xi,
        b,
        value,
    };
    let err = f.reconstruct().frobenius_dist(x);
    if err > RECONSTRUCTION_TOL * (1.0 + x_norm) {
        return Err(Error::Verification(format!(
            "factorization reconstructs X only to {err:e}"
        )));
    }
    // The cutting-plane lambda approaches the optimum from outside the
    // feasible set, so ||B|| (the trace of the rescaled, feasible lambda) can
    // only be held to the square-root accuracy of xi itself.
    let slack = if method == CbbMethod::CuttingPlane {
        tol.sqrt()
    } else {
        tol
    };
    if f.b_norm > value * (1.0 + slack) + slack {
        return Err(Error::Verification(format!(
            "||B|| = {} exceeds the norm value {value}",
            f.b_norm
        )));
    }
    Ok(f)
}

/// Optimal dominating `P` for self-adjoint `x`.
fn optimal_p(x: &Matrix, tol: f64) -> Result<(Matrix, f64)> {
    x.check_hermitian()?;
    let r = schur_norm(x, SchurMethod::Auto, tol)?;
    Ok((r.witness, r.value))
}

fn check_psd(a: &Matrix, band: f64, what: &str) -> Result<()> {
    let e = eigvalsh(a)?;
    if e[0] < -band {
        return Err(Error::Verification(format!(
            "{what} has eigenvalue {:e} below the tolerance band",
            e[0]
        )));
    }
    Ok(())
}

/// `X = A - B` with `A = (P + X)/2 >= 0`, `B = (P - X)/2 >= 0` and
/// `||A + B||_S = ||P||_S = ||X||_S` for an optimal dominating `P`.
pub fn jordan_schur_decomposition(x: &Matrix, tol: f64) -> Result<(Matrix, Matrix)> {
    check_tol(tol)?;
    let (p, value) = optimal_p(x, tol)?;
    let h = x.hermitian_part();
    let a = (&p + &h).scale(0.5);
    let b = (&p - &h).scale(0.5);
    let band = tol * (1.0 + operator_norm(&p));
    check_psd(&a, band, "A")?;
    check_psd(&b, band, "B")?;
    let s = (&a + &b).diag_re().into_iter().fold(0.0, f64::max);
    if s > value * (1.0 + tol) + tol {
        return Err(Error::Verification(format!("||A + B||_S = {s} exceeds {value}")));
    }
    Ok((a, b))
}

/// `L = [sqrt(A); sqrt(B)]`, `R = [sqrt(A); -sqrt(B)]` from the
/// decomposition `X = A - B`, so `L* L = R* R = P` and `L* R = X`.
pub fn schur_lr_factorization(x: &Matrix, tol: f64) -> Result<SchurFactorization> {
    check_tol(tol)?;
    let (p, value) = optimal_p(x, tol)?;
    let h = x.hermitian_part();
    let a = (&p + &h).scale(0.5);
    let b = (&p - &h).scale(0.5);
    let sa = psd_sqrt(&a, tol)?;
    let sb = psd_sqrt(&b, tol)?;
    let l = sa.vstack(&sb)?;
    let r = sa.vstack(&(-&sb))?;
    let cl = column_norm(&l);
    let cr = column_norm(&r);
    if cl * cr > value * (1.0 + tol) + tol {
        return Err(Error::Verification(format!(
            "||L||_c ||R||_c = {} exceeds {value}",
            cl * cr
        )));
    }
    let err = l.adjoint_mul(&r)?.frobenius_dist(&h);
    if err > RECONSTRUCTION_TOL * (1.0 + h.frobenius_norm()) {
        return Err(Error::Verification(format!("L* R reconstructs X only to {err:e}")));
    }
    Ok(SchurFactorization { l, r, value })
}

/// `X = sqrt(P) E sqrt(P)` with `E` a self-adjoint contraction, for the
/// optimal `P` of [`schur_norm`].
pub fn sqrtp_contraction(x: &Matrix, tol: f64) -> Result<(Matrix, Matrix)> {
    check_tol(tol)?;
    let (p, _) = optimal_p(x, tol)?;
    let e = sqrtp_contraction_with(x, &p, tol)?;
    Ok((p, e))
}

/// `E = sqrt(P)^+ X sqrt(P)^+` for a given `P` with `-P <= X <= P`; checks
/// `||E||_inf <= 1 + tol` and `sqrt(P) E sqrt(P) = X`.
pub fn sqrtp_contraction_with(x: &Matrix, p: &Matrix, tol: f64) -> Result<Matrix> {
    check_tol(tol)?;
    x.check_hermitian()?;
    p.check_hermitian()?;
    if p.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.shape(),
            got: p.shape(),
        });
    }
    let h = x.hermitian_part();
    let p = p.hermitian_part();
    let band = tol * (1.0 + operator_norm(&p));
    check_psd(&(&p - &h), band, "P - X")?;
    check_psd(&(&p + &h), band, "P + X")?;
    let r = pinv_sqrt(&p, PSEUDO_INVERSE_TOL)?;
    let e = (&(&r * &h) * &r).hermitian_part();
    let e_norm = operator_norm(&e);
    if e_norm > 1.0 + tol {
        return Err(Error::Verification(format!("||E|| = {e_norm} is not a contraction")));
    }
    let s = psd_sqrt(&p, tol)?;
    let err = (&(&s * &e) * &s).frobenius_dist(&h);
    if err > RECONSTRUCTION_TOL * (1.0 + h.frobenius_norm()) {
        return Err(Error::Verification(format!(
            "sqrt(P) E sqrt(P) reconstructs X only to {err:e}"
        )));
    }
    Ok(e)
}
