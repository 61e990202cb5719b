//! Log-barrier path following with damped Newton centering.
//!
//! Minimizes `c.x` over the interior of a cone described by a self-concordant
//! barrier `B` with parameter `nu`. Each outer step centers
//! `phi(x) = c.x / mu + B(x)` and then shrinks `mu`; at an exact center the
//! duality gap equals `nu * mu`.

use log::trace;

use crate::error::{Error, Result};
use crate::linalg::{real_cholesky, real_cholesky_solve};

pub(crate) const MU_SHRINK: f64 = 0.2;
const ARMIJO: f64 = 0.25;
const BACKTRACK: f64 = 0.5;
const MAX_NEWTON_PER_CENTER: usize = 200;
const MAX_OUTER: usize = 200;
/// Newton decrement below which the iterate counts as centered.
const CENTERED: f64 = 1e-8;
/// Below this decrement, repeated failure to halve the best decrement so far
/// means roundoff has taken over.
const STAGNATION: f64 = QUADRATIC_REGION;
const STAGNATION_STEPS: usize = 3;
/// Inside this decrement a full step stays feasible for a self-concordant
/// barrier, so the line search only guards against roundoff.
const QUADRATIC_REGION: f64 = 0.25;
/// Largest decrement at which a failed line search is attributed to roundoff.
const ROUNDOFF_FLOOR: f64 = 1.0;

pub(crate) struct Derivatives {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `dim x dim`.
    pub hess: Vec<f64>,
}

pub(crate) trait Barrier {
    fn dim(&self) -> usize;
    fn nu(&self) -> f64;
    fn cost(&self) -> &[f64];
    /// Barrier value, or `None` outside the open cone.
    fn value(&self, x: &[f64]) -> Option<f64>;
    fn derivatives(&self, x: &[f64]) -> Option<Derivatives>;
}

#[derive(Debug, Clone)]
pub(crate) struct PathResult {
    pub x: Vec<f64>,
    pub mu: f64,
    pub newton_steps: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Newton direction with symmetric diagonal equilibration; regularizes the
/// scaled system slightly before giving up.
fn newton_direction(hess: &[f64], grad: &[f64], n: usize) -> Result<Vec<f64>> {
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let h = hess[i * n + i];
            if h > 0.0 && h.is_finite() {
                1.0 / h.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    for reg in [0.0, 1e-14, 1e-12, 1e-10] {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = hess[i * n + j] * scale[i] * scale[j];
            }
            a[i * n + i] += reg;
        }
        if real_cholesky(&mut a, n) {
            let mut rhs: Vec<f64> = (0..n).map(|i| -grad[i] * scale[i]).collect();
            real_cholesky_solve(&a, n, &mut rhs);
            let d: Vec<f64> = rhs.iter().zip(&scale).map(|(v, s)| v * s).collect();
            if d.iter().all(|v| v.is_finite()) {
                return Ok(d);
            }
        }
    }
    Err(Error::SingularHessian)
}

/// Newton step for `c.x/mu + B(x)` at `x`.
pub(crate) fn newton_step<B: Barrier>(b: &B, x: &[f64], mu: f64) -> Result<Vec<f64>> {
    let d = b
        .derivatives(x)
        .ok_or_else(|| Error::Verification("barrier iterate left the feasible cone".into()))?;
    let grad: Vec<f64> = d.grad.iter().zip(b.cost()).map(|(g, ci)| g + ci / mu).collect();
    newton_direction(&d.hess, &grad, b.dim())
}

/// Centers `c.x/mu + B(x)` starting from the strictly feasible `x`.
fn center<B: Barrier>(b: &B, x: &mut Vec<f64>, mu: f64) -> Result<usize> {
    let n = b.dim();
    let c = b.cost();
    let mut best = f64::INFINITY;
    let mut stalls = 0;
    for step in 0..MAX_NEWTON_PER_CENTER {
        let d0 = b
            .derivatives(x)
            .ok_or_else(|| Error::Verification("barrier iterate left the feasible cone".into()))?;
        let grad: Vec<f64> = d0.grad.iter().zip(c).map(|(g, ci)| g + ci / mu).collect();
        let dir = newton_direction(&d0.hess, &grad, n)?;
        let slope = dot(&grad, &dir);
        let decrement = (-slope).max(0.0).sqrt();
        if decrement < STAGNATION && decrement > 0.5 * best {
            stalls += 1;
        } else {
            stalls = 0;
        }
        best = best.min(decrement);
        let stagnated = stalls >= STAGNATION_STEPS;
        if decrement <= CENTERED || stagnated {
            // One last full step when it stays feasible; it is essentially free.
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + d).collect();
            if b.value(&cand).is_some() {
                *x = cand;
            }
            return Ok(step + 1);
        }
        // Change of phi along the step, formed without the large c.x/mu term
        // so that small decreases stay resolvable when mu is tiny.
        let cost_slope = dot(c, &dir) / mu;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-14 {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
            if cand == *x {
                break;
            }
            if let Some(bv) = b.value(&cand) {
                let change = alpha * cost_slope + (bv - d0.value);
                if decrement <= QUADRATIC_REGION || change <= ARMIJO * alpha * slope {
                    *x = cand;
                    accepted = true;
                    break;
                }
            }
            alpha *= BACKTRACK;
        }
        if !accepted {
            // Roundoff floor: no representable step decreases phi. Within
            // decrement 1 the iterate is still close enough to the central
            // path for the nu * mu gap bound (up to a factor 2).
            if decrement < ROUNDOFF_FLOOR {
                trace!("centering stalled at decrement {decrement:e}");
                return Ok(step + 1);
            }
            return Err(Error::NoConvergence {
                what: "barrier line search",
                iterations: step,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "Newton centering",
        iterations: MAX_NEWTON_PER_CENTER,
    })
}

/// Follows the central path until `nu * mu <= tol / 2`.
pub(crate) fn follow_path<B: Barrier>(b: &B, x0: Vec<f64>, tol: f64) -> Result<PathResult> {
    if b.value(&x0).is_none() {
        return Err(Error::InvalidArgument("barrier start is not strictly feasible".into()));
    }
    let nu = b.nu();
    let mut x = x0;
    let start_value = dot(b.cost(), &x).abs().max(1e-3);
    let mut mu = start_value / nu;
    let mut newton_steps = 0;
    for outer in 0..MAX_OUTER {
        newton_steps += center(b, &mut x, mu)?;
        trace!("outer {outer}: mu = {mu:e}, objective = {}", dot(b.cost(), &x));
        if nu * mu <= tol / 2.0 {
            return Ok(PathResult { x, mu, newton_steps });
        }
        mu *= MU_SHRINK;
    }
    Err(Error::NoConvergence {
        what: "barrier path following",
        iterations: MAX_OUTER,
    })
}
