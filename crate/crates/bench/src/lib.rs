//! Fixed benchmark instances; the benchmarks themselves live in `benches/`.

use schurkit::sampling;
use schurkit::Matrix;

/// Dimensions used across the benchmarks.
pub const SIZES: [usize; 3] = [4, 8, 16];

/// Seeded self-adjoint instance of size `n`.
pub fn selfadjoint(n: usize) -> Matrix {
    sampling::selfadjoint(&mut sampling::seeded(0xBE4C + n as u64), n)
}

/// Seeded general `m x n` instance.
pub fn general(m: usize, n: usize) -> Matrix {
    sampling::general(&mut sampling::seeded(0xBE4D + (m * 31 + n) as u64), m, n)
}
