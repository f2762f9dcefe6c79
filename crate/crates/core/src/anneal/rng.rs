//! Counter-based random numbers.
//!
//! Every draw is a pure function of `(key, counter, lane)`, so the value
//! consumed for variable `a` at step `s` does not depend on how candidate
//! evaluation is split across workers.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LANE_MUL: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix64(seed) }
    }

    /// Independent generator for a named purpose derived from the same seed.
    pub fn substream(&self, tag: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(tag.wrapping_mul(LANE_MUL))),
        }
    }

    /// All draws of one counter value.
    #[inline]
    pub fn at(&self, counter: u64) -> Draws {
        Draws {
            base: mix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN))),
        }
    }

    #[inline]
    pub fn next_u64_at(&self, counter: u64, lane: u64) -> u64 {
        self.at(counter).next_u64(lane)
    }

    /// Uniform in `(0, 1]`; never zero, so `ln` and ratios are safe.
    #[inline]
    pub fn uniform_at(&self, counter: u64, lane: u64) -> f64 {
        self.at(counter).uniform(lane)
    }

    /// Uniform integer in `0..bound`.
    #[inline]
    pub fn below_at(&self, counter: u64, lane: u64, bound: usize) -> usize {
        self.at(counter).below(lane, bound)
    }
}

/// Lanes of a single counter value of a [`CounterRng`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Draws {
    base: u64,
}

impl Draws {
    #[inline]
    pub fn next_u64(&self, lane: u64) -> u64 {
        mix64(self.base ^ lane.wrapping_mul(LANE_MUL))
    }

    #[inline]
    pub fn uniform(&self, lane: u64) -> f64 {
        ((self.next_u64(lane) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn below(&self, lane: u64, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        ((self.next_u64(lane) as u128 * bound as u128) >> 64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_function_of_inputs() {
        let r = CounterRng::new(42);
        assert_eq!(r.next_u64_at(5, 9), CounterRng::new(42).next_u64_at(5, 9));
        assert_ne!(r.next_u64_at(5, 9), r.next_u64_at(5, 10));
        assert_ne!(r.next_u64_at(5, 9), r.next_u64_at(6, 9));
        assert_ne!(r.next_u64_at(5, 9), CounterRng::new(43).next_u64_at(5, 9));
        assert_ne!(r.substream(1).next_u64_at(0, 0), r.next_u64_at(0, 0));
    }

    #[test]
    fn uniform_moments_and_range() {
        let r = CounterRng::new(7);
        let n = 200_000u64;
        let (mut sum, mut sq) = (0.0, 0.0);
        for i in 0..n {
            let u = r.uniform_at(i / 100, i % 100);
            assert!(u > 0.0 && u <= 1.0);
            sum += u;
            sq += u * u;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 0.002, "var {var}");
    }

    #[test]
    fn buckets_pass_chi_square() {
        // 16 buckets, 160k draws across both counter and lane axes.
        let r = CounterRng::new(1234);
        let mut counts = [0u64; 16];
        for c in 0..4000u64 {
            for lane in 0..40u64 {
                counts[r.below_at(c, lane, 16)] += 1;
            }
        }
        let expected = 160_000.0 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // 15 dof, p = 0.001 critical value ≈ 37.7
        assert!(chi2 < 37.7, "chi2 {chi2}");
    }

    #[test]
    fn adjacent_lanes_uncorrelated() {
        let r = CounterRng::new(99);
        let n = 100_000u64;
        let mut acc = 0.0;
        for c in 0..n {
            acc += (r.uniform_at(c, 0) - 0.5) * (r.uniform_at(c, 1) - 0.5);
        }
        let corr = acc / n as f64 * 12.0;
        assert!(corr.abs() < 0.02, "correlation {corr}");
    }
}
