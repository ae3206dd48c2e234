//! Deterministic pseudo-randomness.
//!
//! Every stochastic choice in this crate is derived from a 64-bit seed
//! through the splitmix64 mixer. The i-th draw of a stream is a pure
//! function of `(seed, i)`, so realizations, trials and shuffles are
//! reproducible across runs, platforms and worker counts.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `index`-th output of the splitmix64 stream seeded with `seed`.
#[inline]
pub fn stream(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Uniform draw in `[0, 1)` for counter `index` of the stream.
///
/// Uses the top 53 bits, so the result is exactly representable and never 1.
#[inline]
pub fn uniform(seed: u64, index: u64) -> f64 {
    (stream(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives the seed of an independent child stream.
///
/// Used to split a master seed into per-purpose streams (served realization,
/// hallucination, completion, per-trial seeds) without correlation.
#[inline]
pub fn derive(seed: u64, stream_id: u64) -> u64 {
    mix(seed ^ stream_id.wrapping_mul(GAMMA) ^ 0xd1b5_4a32_d192_ed03)
}

/// Sequential splitmix64 generator for shuffles and scenario draws.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, n)`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_f64() * n as f64) as usize % n
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_pure() {
        assert_eq!(stream(42, 7), stream(42, 7));
        assert_ne!(stream(42, 7), stream(42, 8));
        assert_ne!(stream(42, 7), stream(43, 7));
    }

    #[test]
    fn uniform_in_unit_interval() {
        for i in 0..10_000 {
            let u = uniform(123, i);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut xs: Vec<u32> = (0..50).collect();
        SplitMix64::new(9).shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }
}
