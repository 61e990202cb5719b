//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{Matrix, ZERO};
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius mass drops below this
/// fraction of `||H||_F`.
pub const EIG_OFF_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 40;

/// Eigen-pairs of a Hermitian matrix. Eigenvalues are ascending and column
/// `k` of `vectors` pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `U f(Λ) U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.dim();
        let u = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, &w) in fv.iter().enumerate() {
                    if w != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|v| v)
    }
}

fn off_diagonal_mass(h: &Matrix) -> f64 {
    let n = h.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects input that fails [`Matrix::check_hermitian`]; the strictly lower
/// triangle is then taken as the conjugate of the upper one.
pub fn herm_eig(h: &Matrix) -> Result<HermEig> {
    h.check_hermitian()?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();

    if scale == 0.0 {
        return Ok(HermEig {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    let mut converged = false;
    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_mass(&a) <= EIG_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// One two-sided rotation annihilating `a[p][q]`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let r = h.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible relative to both diagonal entries: drop it.
    if r == 0.0 || r <= f64::EPSILON * 1e-3 * (app.abs().min(aqq.abs())) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = h / r; // e^{i phi}
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column transform G = diag(1, e^{-i phi}) * [[c, s], [-s, c]].
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Ascending eigenvalues only.
pub fn eigvalsh(h: &Matrix) -> Result<Vec<f64>> {
    Ok(herm_eig(h)?.values)
}
