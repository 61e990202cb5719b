//! Cutting-plane solution of the semi-infinite program
//!
//! ```text
//! min sum_j lambda_j   s.t.  sum_j lambda_j |xi_j|^2 >= +<X xi, xi>   for unit xi
//!                            sum_j lambda_j |eta_j|^2 >= -<X eta, eta> for unit eta
//! ```
//!
//! Each round solves the finite dual over the current pool of unit vectors
//! (weights `mu`, `nu` on the cuts, one row per coordinate), reads `lambda`
//! off its row duals, and asks a minimum-eigenvalue oracle for violated cuts.
//! New cuts are separated at a point between the master's vertex and a
//! feasible interior point (in-out stabilization).

use log::debug;
use num_complex::Complex64;

use super::lp::{solve_lp, LpProblem, LpStatus};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, operator_norm, DiagVec, Matrix, ONE, ZERO};

const DUPLICATE_OVERLAP: f64 = 1.0 - 1e-12;
/// Weight of the master LP's vertex in the in-out separation point.
const IN_OUT_WEIGHT: f64 = 0.3;
/// Pool size cap, as a multiple of the dimension.
pub const MAX_CUTS_PER_DIM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSign {
    /// `Delta(lambda) - X` family.
    Plus,
    /// `Delta(lambda) + X` family.
    Minus,
}

impl CutSign {
    pub fn factor(self) -> f64 {
        match self {
            CutSign::Plus => 1.0,
            CutSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cut {
    /// Unit vector.
    pub vector: Vec<Complex64>,
    pub sign: CutSign,
}

impl Cut {
    pub fn new(vector: Vec<Complex64>, sign: CutSign) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidArgument("cut vector must be nonzero".into()));
        }
        Ok(Self {
            vector: vector.into_iter().map(|z| z / norm).collect(),
            sign,
        })
    }

    pub fn basis(n: usize, j: usize, sign: CutSign) -> Self {
        let mut v = vec![ZERO; n];
        v[j] = ONE;
        Self { vector: v, sign }
    }

    /// `P_xi = xi xi*`.
    pub fn projection(&self) -> Matrix {
        Matrix::outer(&self.vector, &self.vector)
    }

    fn overlap(&self, other: &Cut) -> f64 {
        self.vector
            .iter()
            .zip(&other.vector)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}

/// Cuts with nonnegative dual weights (`mu` for plus cuts, `nu` for minus).
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
    pub weights: Vec<f64>,
}

impl CutPool {
    /// The `2n` canonical-basis cuts with zero weight.
    pub fn canonical(n: usize) -> Self {
        let mut pool = Self::default();
        for sign in [CutSign::Plus, CutSign::Minus] {
            for j in 0..n {
                pool.cuts.push(Cut::basis(n, j, sign));
                pool.weights.push(0.0);
            }
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Adds `cut` unless a same-sign cut already spans (almost) the same line.
    pub fn insert(&mut self, cut: Cut) -> bool {
        let dup = self
            .cuts
            .iter()
            .any(|c| c.sign == cut.sign && c.overlap(&cut) > DUPLICATE_OVERLAP);
        if dup {
            return false;
        }
        self.cuts.push(cut);
        self.weights.push(0.0);
        true
    }

    pub fn dim(&self) -> Option<usize> {
        self.cuts.first().map(|c| c.vector.len())
    }
}

/// Returns the most violated cut, if either `Delta(lambda) - X` or
/// `Delta(lambda) + X` has an eigenvalue below `-tol`.
pub fn separation_oracle(x: &Matrix, lambda: &DiagVec, tol: f64) -> Result<Option<(Cut, f64)>> {
    Ok(violated_cuts(x, lambda, tol)?.into_iter().next())
}

/// All eigenvector cuts with eigenvalue below `-tol`, most violated first.
/// Each entry carries its violation (the negated eigenvalue).
pub fn violated_cuts(x: &Matrix, lambda: &DiagVec, tol: f64) -> Result<Vec<(Cut, f64)>> {
    x.check_hermitian()?;
    let mut out = Vec::new();
    for sign in [CutSign::Plus, CutSign::Minus] {
        let s = x.scale(-sign.factor()).add_real_diag(lambda.as_slice());
        let e = herm_eig(&s)?;
        for (k, &v) in e.values.iter().enumerate() {
            if v < -tol {
                out.push((
                    Cut {
                        vector: e.vector(k),
                        sign,
                    },
                    -v,
                ));
            }
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ProgramPSolution {
    pub lambda: DiagVec,
    pub value: f64,
    pub pool: CutPool,
    /// Master LP values, one per round, nondecreasing.
    pub history: Vec<f64>,
    /// Largest remaining violation when the loop stopped.
    pub residual: f64,
}

/// Solves the finite master over `pool` and writes the weights back.
fn solve_master(x: &Matrix, pool: &mut CutPool) -> Result<(DiagVec, f64)> {
    let n = x.rows();
    // Variables: one weight per cut. Rows: -sum_k |v_kj|^2 w_k >= -1.
    let objective: Vec<f64> = pool
        .cuts
        .iter()
        .map(|c| -c.sign.factor() * x.quadratic_form(&c.vector).re)
        .collect();
    let constraints: Vec<Vec<f64>> = (0..n)
        .map(|j| pool.cuts.iter().map(|c| -c.vector[j].norm_sqr()).collect())
        .collect();
    let lp = LpProblem::new(objective, constraints, vec![-1.0; n])?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("master LP ended {:?}", sol.status)));
    }
    pool.weights = sol.primal;
    Ok((DiagVec(sol.dual), -sol.value))
}

/// Cutting-plane solve of the semi-infinite program above for self-adjoint `x`.
pub fn solve_program_p(x: &Matrix, tol: f64) -> Result<ProgramPSolution> {
    x.check_hermitian()?;
    let n = x.rows();
    let x = x.hermitian_part();
    let sep_tol = tol * (1.0 + operator_norm(&x));
    let cap = MAX_CUTS_PER_DIM * n;
    let mut pool = CutPool::canonical(n);
    let mut history = Vec::new();
    // Known feasible point: Delta(||X|| 1) -+ X >= 0.
    let mut inner = vec![operator_norm(&x); n];
    loop {
        let (lambda, value) = solve_master(&x, &mut pool)?;
        history.push(value);
        let cuts = violated_cuts(&x, &lambda, sep_tol)?;
        let residual = cuts.first().map_or(0.0, |c| c.1);
        // In-out stabilization: separate at a point between the master's
        // vertex and the feasible point; cuts there are deeper and avoid the
        // vertex zigzag of plain Kelley iterations. When that point turns out
        // feasible it becomes the new inner point and the vertex cuts are used.
        let cuts = if cuts.is_empty() {
            cuts
        } else {
            let mid: Vec<f64> = lambda
                .0
                .iter()
                .zip(&inner)
                .map(|(o, i)| IN_OUT_WEIGHT * o + (1.0 - IN_OUT_WEIGHT) * i)
                .collect();
            let mid_cuts = violated_cuts(&x, &DiagVec(mid.clone()), 0.0)?;
            if mid_cuts.is_empty() {
                inner = mid;
                cuts
            } else {
                mid_cuts
            }
        };
        if cuts.is_empty() {
            return Ok(ProgramPSolution {
                lambda,
                value,
                pool,
                history,
                residual,
            });
        }
        let mut added = 0;
        for (cut, _) in cuts {
            if pool.len() >= cap {
                break;
            }
            if pool.insert(cut) {
                added += 1;
            }
        }
        debug!(
            "round {}: value {value:.12}, violation {residual:e}, pool {}",
            history.len(),
            pool.len()
        );
        if added == 0 {
            if pool.len() >= cap {
                return Err(Error::NoConvergence {
                    what: "cutting plane",
                    iterations: history.len(),
                });
            }
            // Only duplicates of existing cuts remain violated: the master is
            // as tight as the pool can make it.
            return Ok(ProgramPSolution {
                lambda,
                value,
                pool,
                history,
                residual,
            });
        }
    }
}

impl ProgramPSolution {
    /// `lambda` recovered from the certificate through complementary
    /// slackness, `lambda_j (A + B)_jj = Re (Z X)_jj`.
    ///
    /// The master LP's `lambda` is a vertex of the current cut polytope and
    /// converges only like the square root of the value error; this estimate
    /// inherits the (much better) accuracy of the pool weights. Coordinates
    /// the certificate does not touch keep the LP value.
    pub fn certificate_lambda(&self, x: &Matrix) -> DiagVec {
        let (z, a, b) = build_certificate(&self.pool);
        let w = &a + &b;
        let zx = &z * x;
        DiagVec(
            (0..x.rows())
                .map(|j| {
                    let wj = w[(j, j)].re;
                    if wj > 1e-6 {
                        (zx[(j, j)].re / wj).max(0.0)
                    } else {
                        self.lambda.0[j]
                    }
                })
                .collect(),
        )
    }
}

/// `(Z, A, B)` with `A = sum mu P_xi`, `B = sum nu P_eta`, `Z = A - B`.
pub fn build_certificate(pool: &CutPool) -> (Matrix, Matrix, Matrix) {
    let Some(n) = pool.dim() else {
        let z = Matrix::zeros(1, 1);
        return (z.clone(), z.clone(), z);
    };
    let mut a = Matrix::zeros(n, n);
    let mut b = Matrix::zeros(n, n);
    for (cut, &w) in pool.cuts.iter().zip(&pool.weights) {
        if w == 0.0 {
            continue;
        }
        let p = cut.projection().scale(w);
        match cut.sign {
            CutSign::Plus => a = &a + &p,
            CutSign::Minus => b = &b + &p,
        }
    }
    (&a - &b, a, b)
}

/// Tolerance on `||A + B||_S <= 1` in [`check_pool_feasible`].
pub const POOL_FEAS_TOL: f64 = 1e-9;

/// Feasibility of the pool weights for the dual program, through the Schur
/// norm of `W = A + B`.
pub fn check_pool_feasible(pool: &CutPool, schur_norm: impl Fn(&Matrix) -> f64) -> (bool, f64) {
    let (_, a, b) = build_certificate(pool);
    let w = &a + &b;
    let s = schur_norm(&w);
    (s <= 1.0 + POOL_FEAS_TOL, s)
}

/// Schur norm of a PSD matrix: its largest diagonal entry.
pub fn psd_schur_norm(w: &Matrix) -> f64 {
    w.diag_re().into_iter().fold(0.0, f64::max)
}
