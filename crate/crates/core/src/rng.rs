//! SplitMix64, the single pseudo-random source used across the crate.
//!
//! The generator is fixed so that initial harmonic vectors, point clouds and
//! simulated link delays reproduce exactly on any platform or port:
//!
//! ```text
//! state_i  = seed + i * 0x9E3779B97F4A7C15          (wrapping, i >= 1)
//! z        = state_i
//! z        = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z        = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output_i = z ^ (z >> 31)
//! ```
//!
//! Unit floats take the top 53 bits: `(output >> 11) * 2^-53`, in `[0, 1)`.
//!
//! Output `i` depends only on `(seed, i)`, so [`SplitMix64::at`] gives random
//! access into the stream. Simulated nodes use it to draw the initial value
//! of the edges they own without replaying the whole sequence.

/// Weyl increment (golden ratio).
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Output number `index` (0-based) of the stream started at `seed`.
    #[inline]
    pub fn at(seed: u64, index: u64) -> u64 {
        mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform integer in `[0, bound)`; `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below needs a positive bound");
        // multiply-shift keeps the mapping specified and branch-free
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

#[inline]
pub fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * UNIT
}

/// Derives an independent stream seed for sub-task `index` of `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    SplitMix64::at(base ^ 0x5851_F42D_4C95_7F2D, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs_for_seed_zero() {
        // published SplitMix64 test vector for seed 0
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn random_access_matches_sequence() {
        let mut g = SplitMix64::new(12345);
        for i in 0..100 {
            assert_eq!(g.next_u64(), SplitMix64::at(12345, i));
        }
    }

    #[test]
    fn unit_range() {
        let mut g = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = g.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
        assert_eq!(to_unit(u64::MAX), 1.0 - UNIT);
    }

    #[test]
    fn below_stays_in_bounds() {
        let mut g = SplitMix64::new(3);
        for _ in 0..1000 {
            assert!(g.next_below(5) < 5);
        }
    }
}
