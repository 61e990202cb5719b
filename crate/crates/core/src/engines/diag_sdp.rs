//! `min c.lambda  s.t.  Delta(lambda) + F_k >= 0` for a list of Hermitian
//! offsets `F_k`, with dual matrices `M_k >= 0`, `diag(sum M_k) = c`.

use super::barrier::{follow_path, newton_step, Barrier, Derivatives};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_inverse, cholesky_logdet, eigvalsh, herm_eig, operator_norm, DiagVec, Matrix};

#[derive(Debug, Clone)]
pub struct DiagSdpProblem {
    pub n: usize,
    pub weights: Vec<f64>,
    pub offsets: Vec<Matrix>,
}

#[derive(Debug, Clone)]
pub struct DiagSdpSolution {
    pub lambda: DiagVec,
    pub value: f64,
    /// One PSD matrix per offset, rescaled so `diag(sum M_k) = c` exactly.
    pub duals: Vec<Matrix>,
    /// `value - sum_k(-Tr(M_k F_k))`.
    pub gap: f64,
    pub iterations: usize,
    /// Largest `|d_j - 1|` over the diagonal rescaling applied to the duals.
    pub dual_rescale: f64,
    /// Smallest eigenvalue over all `Delta(lambda) + F_k`.
    pub min_slack_eigenvalue: f64,
}

impl DiagSdpProblem {
    pub fn new(weights: Vec<f64>, offsets: Vec<Matrix>) -> Result<Self> {
        let p = Self {
            n: weights.len(),
            weights,
            offsets,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit weights.
    pub fn unit(n: usize, offsets: Vec<Matrix>) -> Result<Self> {
        Self::new(vec![1.0; n], offsets)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.offsets.is_empty() {
            return Err(Error::InvalidArgument(
                "diagonal SDP needs n >= 1 and at least one offset".into(),
            ));
        }
        if self.weights.iter().any(|&c| !c.is_finite() || c <= 0.0) {
            return Err(Error::InvalidArgument("diagonal SDP weights must be positive".into()));
        }
        for f in &self.offsets {
            if f.shape() != (self.n, self.n) {
                return Err(Error::ShapeMismatch {
                    expected: (self.n, self.n),
                    got: f.shape(),
                });
            }
            f.check_hermitian()?;
        }
        Ok(())
    }
}

struct DiagBarrier<'a> {
    n: usize,
    cost: &'a [f64],
    offsets: Vec<Matrix>,
}

impl DiagBarrier<'_> {
    fn slack(&self, lambda: &[f64], k: usize) -> Matrix {
        self.offsets[k].add_real_diag(lambda)
    }
}

impl Barrier for DiagBarrier<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn nu(&self) -> f64 {
        (self.offsets.len() * self.n) as f64
    }

    fn cost(&self) -> &[f64] {
        self.cost
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        let mut v = 0.0;
        for k in 0..self.offsets.len() {
            v -= cholesky_logdet(&cholesky(&self.slack(x, k))?);
        }
        Some(v)
    }

    fn derivatives(&self, x: &[f64]) -> Option<Derivatives> {
        let n = self.n;
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for k in 0..self.offsets.len() {
            let l = cholesky(&self.slack(x, k))?;
            value -= cholesky_logdet(&l);
            let t = cholesky_inverse(&l);
            for i in 0..n {
                grad[i] -= t[(i, i)].re;
                for j in 0..n {
                    hess[i * n + j] += t[(i, j)].norm_sqr();
                }
            }
        }
        Some(Derivatives { value, grad, hess })
    }
}

/// Drops the negative spectrum of a Hermitian matrix.
fn psd_part(m: &Matrix) -> Result<Matrix> {
    let e = herm_eig(m)?;
    if e.min() >= 0.0 {
        return Ok(m.clone());
    }
    Ok(e.reconstruct_with(|v| v.max(0.0)))
}

/// Solves the diagonal-domination SDP by barrier path following.
///
/// The offsets are scaled to unit operator norm internally, so `tol` acts
/// relative to `max_k ||F_k||`.
pub fn solve_diag_sdp(p: &DiagSdpProblem, tol: f64) -> Result<DiagSdpSolution> {
    p.validate()?;
    let n = p.n;
    let scale = p.offsets.iter().map(operator_norm).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let barrier = DiagBarrier {
        n,
        cost: &p.weights,
        offsets: p
            .offsets
            .iter()
            .map(|f| f.hermitian_part().scale(1.0 / scale))
            .collect(),
    };

    // ||F_k / scale|| <= 1, so lambda = 2 is strictly feasible.
    let path = follow_path(&barrier, vec![2.0; n], tol)?;
    let lambda_scaled = path.x;

    // Dual matrices M_k = mu (T_k - T_k Delta(d) T_k) with T_k = S_k^{-1} and
    // d the Newton step at the final iterate. By the Newton equations
    // diag(sum M_k) = c holds exactly (up to roundoff) even off the central
    // path, and M_k >= 0 whenever the Newton decrement is below 1.
    let step = newton_step(&barrier, &lambda_scaled, path.mu)?;
    let mut duals = Vec::with_capacity(p.offsets.len());
    let mut min_slack = f64::INFINITY;
    for k in 0..p.offsets.len() {
        let s = barrier.slack(&lambda_scaled, k);
        let l =
            cholesky(&s).ok_or_else(|| Error::Verification("final barrier iterate is not strictly feasible".into()))?;
        let t = cholesky_inverse(&l);
        let correction = Matrix::from_fn(n, n, |i, j| (0..n).map(|r| t[(i, r)] * step[r] * t[(r, j)]).sum());
        duals.push(psd_part(&(&t - &correction).hermitian_part().scale(path.mu))?);
        if let Ok(e) = eigvalsh(&s) {
            min_slack = min_slack.min(e[0] * scale);
        }
    }
    let mut dsum = vec![0.0; n];
    for m in &duals {
        for (j, d) in dsum.iter_mut().enumerate() {
            *d += m[(j, j)].re;
        }
    }
    let factors: Vec<f64> = dsum.iter().zip(&p.weights).map(|(d, c)| (c / d).sqrt()).collect();
    if factors.iter().any(|f| !f.is_finite()) {
        return Err(Error::Verification("degenerate barrier duals".into()));
    }
    let dual_rescale = factors.iter().map(|f| (f - 1.0).abs()).fold(0.0, f64::max);
    for m in &mut duals {
        *m = Matrix::from_fn(n, n, |i, j| m[(i, j)] * (factors[i] * factors[j]));
    }

    let lambda: Vec<f64> = lambda_scaled.iter().map(|v| v * scale).collect();
    let value: f64 = lambda.iter().zip(&p.weights).map(|(l, c)| l * c).sum();
    let dual_value: f64 = duals.iter().zip(&p.offsets).map(|(m, f)| -(m * f).trace().re).sum();
    Ok(DiagSdpSolution {
        lambda: DiagVec(lambda),
        value,
        duals,
        gap: value - dual_value,
        iterations: path.newton_steps,
        dual_rescale,
        min_slack_eigenvalue: min_slack,
    })
}
