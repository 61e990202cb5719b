//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are in inequality form `min c.x  s.t.  G x >= h, x >= 0`. Dual
//! multipliers `y >= 0` for the rows of `G` are read from the final basis,
//! and both primal and dual are re-solved against the original data once
//! the basis is known, so tableau drift does not leak into the answer.

use crate::error::{Error, Result};

/// Feasibility / optimality tolerance reported in [`LpSolution`] checks.
pub const LP_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Row-major `K x N` constraint matrix.
    pub constraints: Vec<Vec<f64>>,
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, constraints: Vec<Vec<f64>>, bounds: Vec<f64>) -> Result<Self> {
        let p = Self {
            objective,
            constraints,
            bounds,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 || self.constraints.is_empty() {
            return Err(Error::InvalidArgument(
                "LP needs at least one variable and one constraint".into(),
            ));
        }
        if self.bounds.len() != self.constraints.len() {
            return Err(Error::InvalidArgument(
                "LP bounds length differs from constraint count".into(),
            ));
        }
        if self.constraints.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("LP constraint row has wrong length".into()));
        }
        let finite = self.objective.iter().chain(&self.bounds).all(|v| v.is_finite())
            && self.constraints.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("LP data must be finite".into()));
        }
        Ok(())
    }

    /// Worst violation of `G x >= h` and `x >= 0`.
    pub fn primal_infeasibility(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().zip(&self.bounds).map(|(g, &h)| h - dot(g, x));
        rows.chain(x.iter().map(|&v| -v)).fold(0.0, f64::max)
    }

    /// Worst violation of dual feasibility `G^T y <= c`, `y >= 0`.
    pub fn dual_infeasibility(&self, y: &[f64]) -> f64 {
        let n = self.num_vars();
        let mut worst = y.iter().map(|&v| -v).fold(0.0, f64::max);
        for j in 0..n {
            let gty: f64 = self.constraints.iter().zip(y).map(|(g, &yi)| g[j] * yi).sum();
            worst = worst.max(gty - self.objective[j]);
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb == 0.0 {
                continue;
            }
            for (j, rj) in r.iter_mut().enumerate() {
                *rj -= cb * self.at(i, j);
            }
        }
        r
    }

    /// Runs Bland-rule pivots on `cost`, never entering a column for which
    /// `allowed` is false. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<bool> {
        let scale = 1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp("pivot limit exceeded (cycling guard)".into()));
            }
            let r = self.reduced_costs(cost);
            let entering = (0..self.cols).find(|&j| allowed(j) && r[j] < -PIVOT_EPS * scale);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-13 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, c);
        }
    }
}

/// Solves `A z = b` for square dense `A` by partial-pivot elimination.
fn dense_solve(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Option<Vec<f64>> {
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pv < 1e-300 {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        for i in (k + 1)..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k * n + j] * b[j];
        }
        b[k] = s / a[k * n + k];
    }
    Some(b)
}

/// Solves an inequality-form LP.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();
    let k = p.num_constraints();

    // Standard form, one row per constraint:
    //   h_i > 0:  G_i x - s_i + a_i = h_i      (artificial a_i basic)
    //   h_i <= 0: -G_i x + s_i     = -h_i     (surplus s_i basic)
    let sign: Vec<f64> = p.bounds.iter().map(|&h| if h > 0.0 { 1.0 } else { -1.0 }).collect();
    let art_rows: Vec<usize> = (0..k).filter(|&i| sign[i] > 0.0).collect();
    let n_art = art_rows.len();
    let cols = n + k + n_art;
    let mut art_col = vec![usize::MAX; k];
    for (a, &i) in art_rows.iter().enumerate() {
        art_col[i] = n + k + a;
    }
    // Column that starts as the identity for row i.
    let unit_col: Vec<usize> = (0..k).map(|i| if sign[i] > 0.0 { art_col[i] } else { n + i }).collect();

    let w = cols + 1;
    let mut t = vec![0.0; k * w];
    for i in 0..k {
        for j in 0..n {
            t[i * w + j] = sign[i] * p.constraints[i][j];
        }
        t[i * w + n + i] = -sign[i];
        if sign[i] > 0.0 {
            t[i * w + art_col[i]] = 1.0;
        }
        t[i * w + cols] = sign[i] * p.bounds[i];
    }
    let mut tab = Tableau {
        rows: k,
        cols,
        t,
        basis: unit_col.clone(),
        pivots: 0,
    };
    let is_art = |j: usize| j >= n + k;

    if n_art > 0 {
        let mut c1 = vec![0.0; cols];
        c1[n + k..].fill(1.0);
        tab.optimize(&c1, &|_| true)?;
        let infeas: f64 = (0..k).filter(|&i| is_art(tab.basis[i])).map(|i| tab.rhs(i)).sum();
        let scale = 1.0 + p.bounds.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if infeas > 1e-9 * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![0.0; n],
                dual: vec![0.0; k],
                value: f64::NAN,
                pivots: tab.pivots,
            });
        }
        // Drive zero-level artificials out where a structural pivot exists.
        for i in 0..k {
            if is_art(tab.basis[i]) {
                if let Some(c) = (0..n + k).find(|&j| tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, c);
                }
            }
        }
    }

    let mut c2 = vec![0.0; cols];
    c2[..n].copy_from_slice(&p.objective);
    let bounded = tab.optimize(&c2, &|j| !is_art(j))?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: vec![0.0; n],
            dual: vec![0.0; k],
            value: f64::NEG_INFINITY,
            pivots: tab.pivots,
        });
    }

    // Recover x and y from the basis against the original data.
    let column = |j: usize, i: usize| -> f64 {
        if j < n {
            sign[i] * p.constraints[i][j]
        } else if j < n + k {
            if j - n == i {
                -sign[i]
            } else {
                0.0
            }
        } else if j == art_col[i] {
            1.0
        } else {
            0.0
        }
    };
    let mut bmat = vec![0.0; k * k];
    for (r, &bj) in tab.basis.iter().enumerate() {
        for i in 0..k {
            bmat[i * k + r] = column(bj, i);
        }
    }
    let rhs: Vec<f64> = (0..k).map(|i| sign[i] * p.bounds[i]).collect();
    let cb: Vec<f64> = tab.basis.iter().map(|&j| c2[j]).collect();
    let mut bt = vec![0.0; k * k];
    for i in 0..k {
        for r in 0..k {
            bt[r * k + i] = bmat[i * k + r];
        }
    }
    let (xb, pi) = match (dense_solve(bmat, k, rhs), dense_solve(bt, k, cb)) {
        (Some(xb), Some(pi)) => (xb, pi),
        _ => {
            // Fall back to the tableau values.
            let xb = (0..k).map(|i| tab.rhs(i)).collect();
            let pi = (0..k)
                .map(|i| (0..k).map(|r| c2[tab.basis[r]] * tab.at(r, unit_col[i])).sum())
                .collect();
            (xb, pi)
        }
    };

    let mut x = vec![0.0; n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = xb[r].max(0.0);
        }
    }
    let y: Vec<f64> = (0..k).map(|i| (sign[i] * pi[i]).max(0.0)).collect();
    let value = dot(&p.objective, &x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal: x,
        dual: y,
        value,
        pivots: tab.pivots,
    })
}
