//! Seeded, portable randomness for the draw loop.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, both
//! of which are specified bit-for-bit independently of platform. Indices are
//! drawn with Lemire's widening-multiply method: take a 64-bit word `x`,
//! form the 128-bit product `x · n`, and accept the high word unless the low
//! word falls below `2⁶⁴ mod n`, in which case draw again. This is exactly
//! uniform on `0..n`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct DeliRng(ChaCha8Rng);

impl DeliRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        DeliRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform index in `0..n`. Panics on `n == 0`.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw from an empty range");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(n);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.0
    }
}
