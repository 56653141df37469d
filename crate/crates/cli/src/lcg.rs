//! Seeded random congruence matrices for `check`.
//!
//! The generator is Knuth's MMIX 64-bit linear congruential generator
//! (`x ← 6364136223846793005·x + 1442695040888963407 mod 2⁶⁴`), starting from
//! the seed itself. Each draw keeps the top 53 bits, maps them to `[0, 1)` and
//! then to `[−1, 1)`. Matrices are filled row-major and redrawn while
//! `|det| < 1e-6`.

use spd_median::nalgebra::DMatrix;

pub const MIN_ABS_DET: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in `[−1, 1)`.
    pub fn next_signed_unit(&mut self) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        2.0 * u - 1.0
    }

    pub fn congruence(&mut self, d: usize) -> DMatrix<f64> {
        loop {
            let entries: Vec<f64> = (0..d * d).map(|_| self.next_signed_unit()).collect();
            let c = DMatrix::from_row_slice(d, d, &entries);
            if c.determinant().abs() >= MIN_ABS_DET {
                return c;
            }
        }
    }
}
