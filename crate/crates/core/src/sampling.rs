//! Seeded random instances.
//!
//! All generators draw from `ChaCha8Rng` seeded with a `u64` via
//! `SeedableRng::seed_from_u64`. A complex standard Gaussian has independent
//! real and imaginary parts distributed as `N(0, 1/2)`, so `E|z|^2 = 1`.
//! Entries are drawn row-major, real part before imaginary part.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::Rng;

use crate::linalg::Matrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// `m x n` matrix with i.i.d. complex standard Gaussian entries.
pub fn general<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| complex_gaussian(rng))
}

/// `(G + G*) / 2` for Gaussian `G`.
pub fn selfadjoint<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    general(rng, n, n).hermitian_part()
}

/// `G G* / n` for square Gaussian `G` (full rank almost surely).
pub fn psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = general(rng, n, n);
    (&g * &g.adjoint()).scale(1.0 / n as f64).hermitian_part()
}

/// Diagonal matrix with real Gaussian diagonal.
pub fn real_diag<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_real_diag(&d)
}

/// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = general(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}
