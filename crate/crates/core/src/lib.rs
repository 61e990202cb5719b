//! Schur multiplier norm `||X||_S` and its dual norm `||X||_cbB` for dense
//! complex matrices.
//!
//! Both norms are computed from order-domination programs: the Schur norm
//! minimizes the largest diagonal entry of a dominating positive matrix, the
//! dual norm minimizes the trace of a dominating diagonal. Two independent
//! engines solve these programs (a log-det barrier method and a cutting-plane
//! LP), and every result carries a primal witness and, for the dual norm, a
//! certificate matrix `Z` with `||Z||_S <= 1` and `Tr(Z* X) = ||X||_cbB`.

pub mod engines;
pub mod error;
pub mod linalg;
pub mod norms;
pub mod oracles;
pub mod sampling;

pub use error::{Error, Result};
pub use linalg::{DiagVec, HermEig, Matrix};
pub use norms::{
    cbb_factorization, cbb_factorization_with, cbb_norm, duality_pair, jordan_schur_decomposition, norm_sandwich,
    schur_lr_factorization, schur_norm, sqrtp_contraction, sqrtp_contraction_with, verify, CbbFactorization, CbbMethod,
    Diagnostics, Method, NormKind, NormResult, SandwichReport, SchurFactorization, SchurMethod, Verification,
};

/// Default absolute-plus-relative solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
