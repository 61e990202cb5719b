//! Shared helpers for the integration tests.

#![allow(dead_code)]

use schurkit::sampling::{self, SeededRng};
use schurkit::Matrix;

pub fn rng(seed: u64) -> SeededRng {
    sampling::seeded(seed)
}

pub fn selfadjoint(seed: u64, n: usize) -> Matrix {
    sampling::selfadjoint(&mut rng(seed), n)
}

pub fn general(seed: u64, m: usize, n: usize) -> Matrix {
    sampling::general(&mut rng(seed), m, n)
}

pub fn psd(seed: u64, n: usize) -> Matrix {
    sampling::psd(&mut rng(seed), n)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}
