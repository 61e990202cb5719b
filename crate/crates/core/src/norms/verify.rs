//! Independent re-check of a [`NormResult`] against its input.

use num_complex::Complex64;

use super::{check_tol, domination_residual, duality_pair, schur_norm, NormKind, NormResult, SchurMethod};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    /// `Tr(Z* X)`.
    pub pairing: Complex64,
    /// `|Tr(Z* X) - value|`.
    pub pairing_residual: f64,
    /// `||Z||_S`, recomputed from scratch.
    pub schur_norm: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// Largest violation of the domination constraints by the witness.
    pub feasibility_residual: f64,
    pub feasible: bool,
    /// Distance between the value and the one implied by the witness
    /// (largest diagonal entry, or the (halved) trace).
    pub value_residual: f64,
    pub value_consistent: bool,
    pub certificate: Option<CertificateCheck>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.feasible && self.value_consistent && self.certificate.as_ref().is_none_or(|c| c.passed)
    }
}

/// Re-derives every [`NormResult`] invariant for input `x`:
///
/// * witness feasibility within `2 tol (1 + ||X||)`,
/// * value equal to the witness objective within `tol (1 + value)`,
/// * for certificates, `|Tr(Z* X) - value| <= tol (1 + value)` and
///   `||Z||_S <= 1 + tol`.
pub fn verify(x: &Matrix, result: &NormResult, tol: f64) -> Result<Verification> {
    check_tol(tol)?;
    let (m, n) = x.shape();
    let size = if result.embedded { m + n } else { n };
    if result.witness.shape() != (size, size) || (!result.embedded && m != n) {
        return Err(Error::ShapeMismatch {
            expected: (size, size),
            got: result.witness.shape(),
        });
    }
    let feasibility_residual = domination_residual(&result.witness, &result.offsets(x))?;
    let feas_tol = 2.0 * tol * (1.0 + operator_norm(x));
    let diag = result.witness.diag_re();
    let implied = match result.kind {
        NormKind::Schur => diag.iter().copied().fold(0.0, f64::max),
        NormKind::Cbb => {
            let t: f64 = diag.iter().sum();
            if result.embedded {
                0.5 * t
            } else {
                t
            }
        }
    };
    let value_residual = (implied - result.value).abs();
    let certificate = match &result.certificate {
        None => None,
        Some(z) => {
            let pairing = duality_pair(x, z)?;
            let pairing_residual = (pairing - result.value).norm();
            let s = schur_norm(z, SchurMethod::Auto, tol)?.value;
            Some(CertificateCheck {
                pairing,
                pairing_residual,
                schur_norm: s,
                passed: pairing_residual <= tol * (1.0 + result.value) && s <= 1.0 + tol,
            })
        }
    };
    Ok(Verification {
        feasibility_residual,
        feasible: feasibility_residual <= feas_tol,
        value_residual,
        value_consistent: value_residual <= tol * (1.0 + result.value),
        certificate,
    })
}
