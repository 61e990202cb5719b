//! Reference computations independent of the main solvers: closed forms for
//! rank-one inputs, sampled lower bounds straight from the norm definitions,
//! and a randomized search over small block witnesses.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{block_embed, eigvalsh, entry_norms, operator_norm, schur_product, Matrix, ZERO};
use crate::norms::{duality_pair, schur_norm, SchurMethod};
use crate::sampling;

/// Interval known to contain a norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub trials: usize,
}

impl Bracket {
    pub fn new(lower: f64, upper: f64, trials: usize) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper + 1e-12 {
            return Err(Error::Verification(format!("empty bracket [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper, trials })
    }

    /// `value` lies in the bracket up to `slack`.
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `||u v*||_S = ||u||_inf ||v||_inf`.
pub fn rank_one_schur_norm(u: &[Complex64], v: &[Complex64]) -> f64 {
    max_abs(u) * max_abs(v)
}

/// `||e e*||_cbB = (sum |e_j|)^2`.
pub fn rank_one_domination_cbb(e: &[Complex64]) -> f64 {
    e.iter().map(|z| z.norm()).sum::<f64>().powi(2)
}

/// `max ||X o Y|| / ||Y||` over `Y = J` and `trials - 1` complex Gaussian
/// matrices. Never exceeds `||X||_S`.
pub fn sampled_schur_lower_bound(x: &Matrix, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if x.is_zero() {
        return Ok(0.0);
    }
    let (m, n) = x.shape();
    let mut rng = sampling::seeded(seed);
    let mut best: f64 = 0.0;
    for k in 0..trials {
        let y = if k == 0 {
            Matrix::ones(m, n)
        } else {
            sampling::general(&mut rng, m, n)
        };
        let ny = operator_norm(&y);
        if ny > 0.0 {
            best = best.max(operator_norm(&schur_product(x, &y)?) / ny);
        }
    }
    Ok(best)
}

/// `max |Tr(Y* X)| / ||Y||_S` over the phase pattern of `X`, `X` itself and
/// `trials - 2` complex Gaussian matrices. `||Y||_S` is an SDP upper bound,
/// so the result never exceeds `||X||_cbB`.
pub fn sampled_cbb_lower_bound(x: &Matrix, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if x.is_zero() {
        return Ok(0.0);
    }
    let (m, n) = x.shape();
    let mut rng = sampling::seeded(seed);
    let mut best: f64 = 0.0;
    for k in 0..trials {
        let y = match k {
            0 => x.map(|z| if z == ZERO { ZERO } else { z / z.norm() }),
            1 => x.clone(),
            _ => sampling::general(&mut rng, m, n),
        };
        let s = schur_norm(&y, SchurMethod::Auto, 1e-10)?.value;
        if s > 0.0 {
            best = best.max(duality_pair(x, &y)?.norm() / s);
        }
    }
    Ok(best)
}

/// Largest total dimension `m + n` accepted by [`random_search_blocksdp`].
pub const RANDOM_SEARCH_MAX_DIM: usize = 4;

/// Upper bound on `||X||_S` by annealed random search over block-diagonal
/// Hermitian `D = D1 (+) D2` dominating `Y = block_embed(X)`.
///
/// For fixed off-diagonal parts `O` of the blocks, the best diagonal is
/// constant, so each candidate costs one eigenvalue problem:
/// `f(O) = lambda_max(Y - O)`. Every evaluated `f` is attained by a feasible
/// `D`, hence every value (in particular the returned best) is an upper bound.
pub fn random_search_blocksdp(x: &Matrix, trials: usize, seed: u64) -> Result<f64> {
    let (m, n) = x.shape();
    if m + n > RANDOM_SEARCH_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "random search supports m + n <= {RANDOM_SEARCH_MAX_DIM}, got {}",
            m + n
        )));
    }
    let y = block_embed(x);
    // Real coordinates (re, im) of the strictly upper off-diagonal entries of each block.
    let mut pairs = Vec::new();
    for (start, size) in [(0, m), (m, n)] {
        for p in start..start + size {
            for q in p + 1..start + size {
                pairs.push((p, q));
            }
        }
    }
    let objective = |coords: &[f64]| -> Result<f64> {
        let mut d = y.clone();
        for (k, &(p, q)) in pairs.iter().enumerate() {
            let o = Complex64::new(coords[2 * k], coords[2 * k + 1]);
            d[(p, q)] -= o;
            d[(q, p)] -= o.conj();
        }
        Ok(*eigvalsh(&d)?.last().expect("nonempty"))
    };
    let mut current = vec![0.0; 2 * pairs.len()];
    let mut f_current = objective(&current)?;
    let mut best = f_current;
    if pairs.is_empty() || x.is_zero() {
        return Ok(best);
    }
    let scale = entry_norms(x).0;
    let mut rng = sampling::seeded(seed);
    for k in 0..trials {
        // Step decays geometrically from ||X||_max to 1e-6 ||X||_max.
        let frac = k as f64 / trials as f64;
        let step = scale * 1e-6_f64.powf(frac);
        let temperature = 0.1 * step;
        let cand: Vec<f64> = current
            .iter()
            .map(|c| c + step * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let f = objective(&cand)?;
        let accept = f <= f_current || rng.random::<f64>() < (-(f - f_current) / temperature).exp();
        if accept {
            current = cand;
            f_current = f;
            best = best.min(f);
        }
    }
    Ok(best)
}

/// `[sampled lower bound, upper bound]` for `||X||_S`; the upper bound is the
/// random search when it applies and the operator norm otherwise.
pub fn schur_bracket(x: &Matrix, trials: usize, seed: u64) -> Result<Bracket> {
    let lower = sampled_schur_lower_bound(x, trials, seed)?;
    let (m, n) = x.shape();
    let upper = if m + n <= RANDOM_SEARCH_MAX_DIM {
        random_search_blocksdp(x, trials, seed)?.min(operator_norm(x))
    } else {
        operator_norm(x)
    };
    Bracket::new(lower, upper, trials)
}

/// `[sampled lower bound, sum |X_ij|]` for `||X||_cbB`.
pub fn cbb_bracket(x: &Matrix, trials: usize, seed: u64) -> Result<Bracket> {
    let lower = sampled_cbb_lower_bound(x, trials, seed)?;
    Bracket::new(lower, entry_norms(x).1, trials)
}
