//! Deterministic splittable random streams.
//!
//! All sampling in this crate goes through [`Stream`], a SplitMix64
//! generator with a cheap substream derivation. Substreams let a sweep
//! assign one independent stream per sample point (or per sphere factor),
//! so results do not depend on evaluation order and a report is a pure
//! function of its seed.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;
const TAG_MULT: u64 = 0xA24B_AED4_963E_E407;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Derive an independent seed from a parent seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut s = seed ^ tag.wrapping_mul(TAG_MULT);
    // Two mixing rounds decorrelate adjacent tags.
    splitmix64(&mut s);
    splitmix64(&mut s)
}

/// A deterministic random stream.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { state: seed }
    }

    /// A stream independent of `self` identified by `tag`; does not advance
    /// this stream.
    pub fn substream(&self, tag: u64) -> Stream {
        Stream::new(derive_seed(self.state, tag))
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_open_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform in [lo, hi).
    pub fn next_in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn gaussians(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_gaussian()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Stream::new(42);
        let mut b = Stream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substream_does_not_advance_parent() {
        let mut a = Stream::new(7);
        let _ = a.substream(3);
        let mut b = Stream::new(7);
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn substreams_differ_by_tag() {
        let root = Stream::new(123);
        let mut s0 = root.substream(0);
        let mut s1 = root.substream(1);
        let v0: Vec<u64> = (0..8).map(|_| s0.next_u64()).collect();
        let v1: Vec<u64> = (0..8).map(|_| s1.next_u64()).collect();
        assert_ne!(v0, v1);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = Stream::new(9);
        for _ in 0..10_000 {
            let x = s.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut s = Stream::new(11);
        let n = 50_000;
        let xs = s.gaussians(n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
