//! Public entry points: both norms with witnesses and certificates, the
//! factorizations they induce, and diagnostic bounds.
//!
//! Self-adjoint inputs are handled directly. Any other input `X` (`m x n`)
//! is carried to the self-adjoint block embedding `Y = [[0, X], [X*, 0]]`,
//! where `||Y||_S = ||X||_S` and `||Y||_cbB = 2 ||X||_cbB`; witnesses for such
//! inputs live on `Y` and [`NormResult::embedded`] is set.

mod factor;
mod verify;

pub use factor::{
    cbb_factorization, cbb_factorization_with, jordan_schur_decomposition, schur_lr_factorization, sqrtp_contraction,
    sqrtp_contraction_with, CbbFactorization, SchurFactorization, SUPPORT_TOL,
};
pub use verify::{verify, CertificateCheck, Verification};

use std::fmt;

use log::debug;
use num_complex::Complex64;

use crate::engines::{
    build_certificate, solve_blockmaxdiag_sdp, solve_diag_sdp, solve_program_p, BlockMaxDiagProblem, DiagSdpProblem,
};
use crate::error::{Error, Result};
use crate::linalg::{block_embed, eigvalsh, entry_norms, operator_norm, trace_norm, Matrix, HERM_TOL, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    Schur,
    Cbb,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Schur => "schur",
            NormKind::Cbb => "cbb",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a [`NormResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PsdFastpath,
    DiagFastpath,
    Sdp,
    CuttingPlane,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PsdFastpath => "psd-fastpath",
            Method::DiagFastpath => "diag-fastpath",
            Method::Sdp => "sdp",
            Method::CuttingPlane => "cutting-plane",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solver choice for [`schur_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchurMethod {
    /// Closed forms for zero, diagonal and positive inputs, else the SDP.
    #[default]
    Auto,
    /// Always the block max-diagonal SDP.
    Sdp,
}

/// Solver choice for [`cbb_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CbbMethod {
    /// Closed forms for zero and diagonal inputs, else the SDP.
    #[default]
    Auto,
    Sdp,
    CuttingPlane,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Certified bound on `value - optimum` (0 for closed forms).
    pub gap: f64,
    /// Newton steps (SDP) or master LP rounds (cutting plane).
    pub iterations: usize,
    /// Largest violation of the domination constraints by the witness.
    pub feasibility_residual: f64,
    /// Diagonal rescaling applied to barrier duals, `max |d_j - 1|`.
    pub dual_rescale: Option<f64>,
    /// Final cut pool size.
    pub cuts: Option<usize>,
    /// Non-self-adjoint inputs: share of the witness trace (cbb) carried by
    /// the first `m` coordinates.
    pub block_balance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct NormResult {
    pub kind: NormKind,
    pub value: f64,
    /// Dominating `P` (or block-diagonal `D`) for the Schur norm; `Delta(lambda)`
    /// for the dual norm.
    pub witness: Matrix,
    /// Dual norm only: `Z` with `||Z||_S <= 1` and `Tr(Z* X) = value`, same
    /// shape as `X`.
    pub certificate: Option<Matrix>,
    pub method: Method,
    pub diagnostics: Diagnostics,
    /// The witness refers to `block_embed(X)` rather than `X`.
    pub embedded: bool,
}

impl NormResult {
    /// The constraint offsets the witness must dominate: `{-X, X}` for
    /// self-adjoint inputs, `{-Y}` for embedded ones (`W + F >= 0`).
    pub fn offsets(&self, x: &Matrix) -> Vec<Matrix> {
        domination_offsets(x, self.embedded)
    }
}

fn domination_offsets(x: &Matrix, embedded: bool) -> Vec<Matrix> {
    if embedded {
        vec![-&block_embed(x)]
    } else {
        let h = x.hermitian_part();
        vec![-&h, h]
    }
}

/// `max_k max(0, -lambda_min(w + F_k))`.
fn domination_residual(w: &Matrix, offsets: &[Matrix]) -> Result<f64> {
    let mut r: f64 = 0.0;
    for f in offsets {
        let e = eigvalsh(&(w + f).hermitian_part())?;
        r = r.max(-e[0]);
    }
    Ok(r)
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

fn fastpath_result(
    kind: NormKind,
    value: f64,
    witness: Matrix,
    certificate: Option<Matrix>,
    method: Method,
    embedded: bool,
) -> NormResult {
    NormResult {
        kind,
        value,
        witness,
        certificate,
        method,
        diagnostics: Diagnostics::default(),
        embedded,
    }
}

/// `|d|` on the diagonal, doubled up for the block embedding.
fn abs_diag_witness(d: &[Complex64], embedded: bool) -> Matrix {
    let abs: Vec<f64> = d.iter().map(|z| z.norm()).collect();
    if embedded {
        Matrix::from_real_diag(&[abs.clone(), abs].concat())
    } else {
        Matrix::from_real_diag(&abs)
    }
}

/// Smallest eigenvalue is inside the roundoff band below zero.
fn is_psd(h: &Matrix) -> Result<bool> {
    let e = eigvalsh(h)?;
    let top = e.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(e[0] >= -HERM_TOL * (1.0 + top))
}

fn schur_fastpath(x: &Matrix, selfadjoint: bool) -> Result<Option<NormResult>> {
    let (m, n) = x.shape();
    if x.is_zero() {
        let size = if selfadjoint { n } else { m + n };
        return Ok(Some(fastpath_result(
            NormKind::Schur,
            0.0,
            Matrix::zeros(size, size),
            None,
            Method::DiagFastpath,
            !selfadjoint,
        )));
    }
    if x.is_square() && x.is_diagonal() {
        let d = x.diag();
        let value = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let witness = abs_diag_witness(&d, !selfadjoint);
        return Ok(Some(fastpath_result(
            NormKind::Schur,
            value,
            witness,
            None,
            Method::DiagFastpath,
            !selfadjoint,
        )));
    }
    if selfadjoint {
        let h = x.hermitian_part();
        if is_psd(&h)? {
            let value = h.diag_re().into_iter().fold(0.0, f64::max);
            let mut r = fastpath_result(NormKind::Schur, value, h.clone(), None, Method::PsdFastpath, false);
            r.diagnostics.feasibility_residual = domination_residual(&h, &domination_offsets(x, false))?;
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Schur multiplier norm `||X||_S` with a dominating witness.
///
/// Self-adjoint `X`: `min ||diag P||_inf` over `-P <= X <= P`. Otherwise
/// `min ||diag D||_inf` over block-diagonal `D = D1 (+) D2` with
/// `D - block_embed(X) >= 0`.
pub fn schur_norm(x: &Matrix, method: SchurMethod, tol: f64) -> Result<NormResult> {
    check_tol(tol)?;
    let selfadjoint = x.is_hermitian();
    if method == SchurMethod::Auto {
        if let Some(r) = schur_fastpath(x, selfadjoint)? {
            return Ok(r);
        }
    }
    let (problem, embedded) = if selfadjoint {
        let h = x.hermitian_part();
        (BlockMaxDiagProblem::new(vec![h.rows()], vec![h.clone(), -&h])?, false)
    } else {
        let y = block_embed(x);
        (BlockMaxDiagProblem::new(vec![x.rows(), x.cols()], vec![-&y])?, true)
    };
    let s = solve_blockmaxdiag_sdp(&problem, tol)?;
    let feasibility_residual = domination_residual(&s.d, &problem.offsets)?;
    Ok(NormResult {
        kind: NormKind::Schur,
        value: s.t,
        witness: s.d,
        certificate: None,
        method: Method::Sdp,
        diagnostics: Diagnostics {
            gap: s.gap,
            iterations: s.iterations,
            feasibility_residual,
            ..Diagnostics::default()
        },
        embedded,
    })
}

fn cbb_fastpath(x: &Matrix, selfadjoint: bool) -> Option<NormResult> {
    let (m, n) = x.shape();
    if x.is_zero() {
        let size = if selfadjoint { n } else { m + n };
        return Some(fastpath_result(
            NormKind::Cbb,
            0.0,
            Matrix::zeros(size, size),
            Some(Matrix::zeros(m, n)),
            Method::DiagFastpath,
            !selfadjoint,
        ));
    }
    if x.is_square() && x.is_diagonal() {
        let d = x.diag();
        let value = d.iter().map(|z| z.norm()).sum();
        // Unimodular diagonal: Schur norm 1, pairs with X to sum |d_j|.
        let phases: Vec<Complex64> = d.iter().map(|&z| if z == ZERO { ZERO } else { z / z.norm() }).collect();
        return Some(fastpath_result(
            NormKind::Cbb,
            value,
            abs_diag_witness(&d, !selfadjoint),
            Some(Matrix::from_diag(&phases)),
            Method::DiagFastpath,
            !selfadjoint,
        ));
    }
    None
}

/// Dual norm `||X||_cbB` with a diagonal witness and a certificate.
///
/// Self-adjoint `X`: `min Tr Delta(lambda)` over `-Delta(lambda) <= X <= Delta(lambda)`.
/// Otherwise half of `min Tr Delta(lambda)` over `Delta(lambda) >= block_embed(X)`.
pub fn cbb_norm(x: &Matrix, method: CbbMethod, tol: f64) -> Result<NormResult> {
    check_tol(tol)?;
    let selfadjoint = x.is_hermitian();
    if method == CbbMethod::Auto {
        if let Some(r) = cbb_fastpath(x, selfadjoint) {
            return Ok(r);
        }
    }
    let target = if selfadjoint {
        x.hermitian_part()
    } else {
        block_embed(x)
    };
    let embedded = !selfadjoint;
    let offsets = domination_offsets(x, embedded);
    let half = if embedded { 0.5 } else { 1.0 };
    let mut result = match method {
        CbbMethod::CuttingPlane => {
            let s = solve_program_p(&target, tol)?;
            let (z, _, _) = build_certificate(&s.pool);
            let witness = s.lambda.to_matrix();
            let residual = domination_residual(&witness, &offsets)?;
            NormResult {
                kind: NormKind::Cbb,
                value: half * s.value,
                witness,
                certificate: Some(z),
                method: Method::CuttingPlane,
                diagnostics: Diagnostics {
                    // lambda + residual * 1 is feasible
                    gap: half * residual * target.rows() as f64,
                    iterations: s.history.len(),
                    feasibility_residual: residual,
                    cuts: Some(s.pool.len()),
                    ..Diagnostics::default()
                },
                embedded,
            }
        }
        CbbMethod::Auto | CbbMethod::Sdp => {
            let problem = DiagSdpProblem::unit(target.rows(), offsets.clone())?;
            let s = solve_diag_sdp(&problem, tol)?;
            // Self-adjoint: Z = M_1 - M_2 with M_1 paired to Delta - X.
            let z = if embedded {
                s.duals[0].clone()
            } else {
                &s.duals[0] - &s.duals[1]
            };
            NormResult {
                kind: NormKind::Cbb,
                value: half * s.value,
                witness: s.lambda.to_matrix(),
                certificate: Some(z),
                method: Method::Sdp,
                diagnostics: Diagnostics {
                    gap: half * s.gap.max(0.0),
                    iterations: s.iterations,
                    feasibility_residual: (-s.min_slack_eigenvalue).max(0.0),
                    dual_rescale: Some(s.dual_rescale),
                    ..Diagnostics::default()
                },
                embedded,
            }
        }
    };
    if embedded {
        let m = x.rows();
        // Tr(Z_Y Y) = 2 Re Tr(W* X) for the upper-right block W, and W is a
        // submatrix of Z_Y so ||W||_S <= ||Z_Y||_S.
        result.certificate = result.certificate.map(|z| z.block(0, m, m, x.cols()));
        let lambda = result.witness.diag_re();
        let total: f64 = lambda.iter().sum();
        if total > 0.0 {
            let balance = lambda[..m].iter().sum::<f64>() / total;
            debug!("block trace balance {balance:.6}");
            result.diagnostics.block_balance = Some(balance);
        }
    }
    Ok(result)
}

/// `<X, Y> = Tr(Y* X) = sum conj(Y_ij) X_ij`.
pub fn duality_pair(x: &Matrix, y: &Matrix) -> Result<Complex64> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.shape(),
            got: y.shape(),
        });
    }
    Ok(x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| b.conj() * a).sum())
}

/// Elementary brackets around both norms next to the computed values.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    /// `max |X_ij|`.
    pub schur_lower: f64,
    /// Operator norm.
    pub schur_upper: f64,
    /// Trace norm.
    pub cbb_lower: f64,
    /// `sum |X_ij|`.
    pub cbb_upper: f64,
    pub schur: f64,
    pub cbb: f64,
    /// Human-readable description of every bracket the computed values
    /// leave by more than the tolerance.
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `max|X_ij| <= ||X||_S <= ||X||_inf` and `||X||_1 <= ||X||_cbB <= sum|X_ij|`,
/// checked against the default-method norms with slack `tol * (1 + bound)`.
pub fn norm_sandwich(x: &Matrix, tol: f64) -> Result<SandwichReport> {
    let (schur_lower, cbb_upper) = entry_norms(x);
    let schur_upper = operator_norm(x);
    let cbb_lower = trace_norm(x);
    let schur = schur_norm(x, SchurMethod::Auto, tol)?.value;
    let cbb = cbb_norm(x, CbbMethod::Auto, tol)?.value;
    let mut violations = Vec::new();
    let mut check = |name: &str, lo: f64, v: f64, hi: f64| {
        if v < lo - tol * (1.0 + lo.abs()) {
            violations.push(format!("{name} {v:e} below lower bound {lo:e}"));
        }
        if v > hi + tol * (1.0 + hi.abs()) {
            violations.push(format!("{name} {v:e} above upper bound {hi:e}"));
        }
    };
    check("schur", schur_lower, schur, schur_upper);
    check("cbb", cbb_lower, cbb, cbb_upper);
    Ok(SandwichReport {
        schur_lower,
        schur_upper,
        cbb_lower,
        cbb_upper,
        schur,
        cbb,
        violations,
    })
}
