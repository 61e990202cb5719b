//! `min t  s.t.  D + G_k >= 0,  D_jj <= t`, over block-diagonal Hermitian
//! `D` with a prescribed block partition.

use num_complex::Complex64;

use super::barrier::{follow_path, Barrier, Derivatives};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_inverse, cholesky_logdet, operator_norm, Matrix, ZERO};

#[derive(Debug, Clone)]
pub struct BlockMaxDiagProblem {
    pub block_sizes: Vec<usize>,
    pub offsets: Vec<Matrix>,
}

#[derive(Debug, Clone)]
pub struct BlockMaxDiagSolution {
    /// Block-diagonal Hermitian; entries outside the blocks are exactly 0.
    pub d: Matrix,
    /// Largest diagonal entry of `d`.
    pub t: f64,
    /// Certified bound on `t - optimum`.
    pub gap: f64,
    pub iterations: usize,
}

impl BlockMaxDiagProblem {
    pub fn new(block_sizes: Vec<usize>, offsets: Vec<Matrix>) -> Result<Self> {
        let p = Self { block_sizes, offsets };
        p.validate()?;
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be positive".into()));
        }
        if self.offsets.is_empty() {
            return Err(Error::InvalidArgument("block SDP needs at least one offset".into()));
        }
        let n = self.size();
        for g in &self.offsets {
            if g.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    got: g.shape(),
                });
            }
            g.check_hermitian()?;
        }
        Ok(())
    }
}

/// One real coordinate of the block-diagonal Hermitian variable.
#[derive(Debug, Clone, Copy)]
enum Coord {
    Diag(usize),
    /// Real part of `D_pq` (p < q).
    Re(usize, usize),
    /// Imaginary part of `D_pq` (p < q).
    Im(usize, usize),
}

impl Coord {
    /// `E = sum alpha e_p e_q^T` for this coordinate's basis matrix.
    fn terms(self) -> ([(usize, usize, Complex64); 2], usize) {
        const I: Complex64 = Complex64::new(0.0, 1.0);
        const R: Complex64 = Complex64::new(1.0, 0.0);
        match self {
            Coord::Diag(j) => ([(j, j, R), (0, 0, ZERO)], 1),
            Coord::Re(p, q) => ([(p, q, R), (q, p, R)], 2),
            Coord::Im(p, q) => ([(p, q, I), (q, p, -I)], 2),
        }
    }
}

struct BlockBarrier {
    n: usize,
    coords: Vec<Coord>,
    /// Index into `coords` of each diagonal entry.
    diag_index: Vec<usize>,
    offsets: Vec<Matrix>,
    cost: Vec<f64>,
}

impl BlockBarrier {
    fn new(block_sizes: &[usize], offsets: Vec<Matrix>) -> Self {
        let n: usize = block_sizes.iter().sum();
        let mut coords = Vec::new();
        let mut diag_index = vec![0; n];
        let mut start = 0;
        for &s in block_sizes {
            for (j, index) in diag_index.iter_mut().enumerate().skip(start).take(s) {
                *index = coords.len();
                coords.push(Coord::Diag(j));
            }
            for p in start..start + s {
                for q in (p + 1)..start + s {
                    coords.push(Coord::Re(p, q));
                    coords.push(Coord::Im(p, q));
                }
            }
            start += s;
        }
        let mut cost = vec![0.0; coords.len() + 1];
        *cost.last_mut().unwrap() = 1.0;
        Self {
            n,
            coords,
            diag_index,
            offsets,
            cost,
        }
    }

    fn t_index(&self) -> usize {
        self.coords.len()
    }

    fn assemble(&self, x: &[f64]) -> Matrix {
        let mut d = Matrix::zeros(self.n, self.n);
        for (a, c) in self.coords.iter().enumerate() {
            match *c {
                Coord::Diag(j) => d[(j, j)].re = x[a],
                Coord::Re(p, q) => {
                    d[(p, q)].re = x[a];
                    d[(q, p)].re = x[a];
                }
                Coord::Im(p, q) => {
                    d[(p, q)].im = x[a];
                    d[(q, p)].im = -x[a];
                }
            }
        }
        d
    }

    fn start_point(&self, level: f64, t: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.coords.len() + 1];
        for &a in &self.diag_index {
            x[a] = level;
        }
        x[self.t_index()] = t;
        x
    }

    fn diag_slacks(&self, x: &[f64]) -> Option<Vec<f64>> {
        let t = x[self.t_index()];
        let s: Vec<f64> = self.diag_index.iter().map(|&a| t - x[a]).collect();
        s.iter().all(|&v| v > 0.0).then_some(s)
    }
}

impl Barrier for BlockBarrier {
    fn dim(&self) -> usize {
        self.coords.len() + 1
    }

    fn nu(&self) -> f64 {
        ((self.offsets.len() + 1) * self.n) as f64
    }

    fn cost(&self) -> &[f64] {
        &self.cost
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        let slacks = self.diag_slacks(x)?;
        let d = self.assemble(x);
        let mut v = -slacks.iter().map(|s| s.ln()).sum::<f64>();
        for g in &self.offsets {
            v -= cholesky_logdet(&cholesky(&(&d + g))?);
        }
        Some(v)
    }

    fn derivatives(&self, x: &[f64]) -> Option<Derivatives> {
        let slacks = self.diag_slacks(x)?;
        let d = self.assemble(x);
        let dim = self.dim();
        let ti = self.t_index();
        let mut value = -slacks.iter().map(|s| s.ln()).sum::<f64>();
        let mut grad = vec![0.0; dim];
        let mut hess = vec![0.0; dim * dim];

        for g in &self.offsets {
            let l = cholesky(&(&d + g))?;
            value -= cholesky_logdet(&l);
            let t = cholesky_inverse(&l);
            let terms: Vec<_> = self.coords.iter().map(|c| c.terms()).collect();
            for (a, (ta, na)) in terms.iter().enumerate() {
                // d/dx_a (-log det S) = -Tr(S^{-1} E_a)
                let mut tr = ZERO;
                for &(p, q, alpha) in &ta[..*na] {
                    tr += alpha * t[(q, p)];
                }
                grad[a] -= tr.re;
                for (b, (tb, nb)) in terms.iter().enumerate().skip(a) {
                    // Tr(T E_a T E_b) = sum alpha beta T_qr T_sp
                    let mut h = ZERO;
                    for &(p, q, alpha) in &ta[..*na] {
                        for &(r, s, beta) in &tb[..*nb] {
                            h += alpha * beta * t[(q, r)] * t[(s, p)];
                        }
                    }
                    hess[a * dim + b] += h.re;
                    if a != b {
                        hess[b * dim + a] += h.re;
                    }
                }
            }
        }

        // -sum log(t - D_jj)
        for (j, &s) in slacks.iter().enumerate() {
            let a = self.diag_index[j];
            let inv = 1.0 / s;
            let inv2 = inv * inv;
            grad[a] += inv;
            grad[ti] -= inv;
            hess[a * dim + a] += inv2;
            hess[ti * dim + ti] += inv2;
            hess[a * dim + ti] -= inv2;
            hess[ti * dim + a] -= inv2;
        }
        Some(Derivatives { value, grad, hess })
    }
}

/// Solves the block max-diagonal SDP by barrier path following. Offsets are
/// scaled to unit operator norm internally.
pub fn solve_blockmaxdiag_sdp(p: &BlockMaxDiagProblem, tol: f64) -> Result<BlockMaxDiagSolution> {
    p.validate()?;
    let scale = p.offsets.iter().map(operator_norm).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let barrier = BlockBarrier::new(
        &p.block_sizes,
        p.offsets
            .iter()
            .map(|g| g.hermitian_part().scale(1.0 / scale))
            .collect(),
    );
    let path = follow_path(&barrier, barrier.start_point(2.0, 3.0), tol)?;
    let d = barrier.assemble(&path.x).scale(scale);
    let t = d.diag_re().into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(BlockMaxDiagSolution {
        d,
        t,
        gap: barrier.nu() * path.mu * scale,
        iterations: path.newton_steps,
    })
}
