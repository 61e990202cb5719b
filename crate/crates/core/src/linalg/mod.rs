//! Dense complex linear algebra: the matrix type, Hermitian
//! eigendecomposition, PSD calculus and classical norms.

mod eig;
mod matrix;
mod norms;
mod psd;

pub use eig::{eigvalsh, herm_eig, HermEig, EIG_OFF_TOL, MAX_SWEEPS};
pub use matrix::{block_embed, offdiag_compress, schur_product, Matrix, HERM_TOL};
pub use norms::{column_norm, entry_norms, operator_norm, singular_values, trace_norm};
pub use psd::{cholesky, cholesky_inverse, cholesky_logdet, pinv_sqrt, psd_sqrt, support_projection};

pub(crate) use matrix::{ONE, ZERO};
pub(crate) use psd::{real_cholesky, real_cholesky_solve};

/// A real diagonal `Delta(lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagVec(pub Vec<f64>);

impl DiagVec {
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_real_diag(&self.0)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}
