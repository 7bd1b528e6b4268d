//! Reproducible random streams.
//!
//! Every stream is ChaCha8 keyed by a 64-bit seed (expanded to the 256-bit key
//! with SplitMix64) and positioned on one of its 2^64 independent streams.
//! Hierarchical seeds (experiment -> replication -> walk) are derived with
//! [`derive_seed`], so a replication's randomness never depends on how many
//! threads run or in which order replications are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const ALGORITHM: &str = "chacha8/splitmix64-key";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed number `index` of `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut s = parent;
    let a = splitmix64(&mut s);
    let mut t = a ^ index.wrapping_mul(GOLDEN).rotate_left(17);
    splitmix64(&mut t)
}

/// Fold a path of indices into one seed: `derive_seed(derive_seed(root, p0), p1)...`.
pub fn derive_path(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(root, |s, &i| derive_seed(s, i))
}

/// Single-owner random stream. Identical `(seed, stream)` gives an identical
/// sequence of raw 64-bit outputs on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut s = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        RngStream { inner }
    }

    /// Stream owned by walk `walk` of replication `replication`.
    pub fn for_walk(master_seed: u64, replication: u64, walk: u64) -> Self {
        RngStream::new(derive_seed(master_seed, replication), walk)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals by the polar Box-Muller method.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_keys_give_identical_streams() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_and_seeds_differ() {
        let x = RngStream::new(42, 0).next_u64();
        assert_ne!(x, RngStream::new(42, 1).next_u64());
        assert_ne!(x, RngStream::new(43, 0).next_u64());
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_path(5, &[1, 2]), derive_seed(derive_seed(5, 1), 2));
    }

    #[test]
    fn splitmix_reference_values() {
        // published SplitMix64 outputs for seed 0
        let mut s = 0u64;
        assert_eq!(splitmix64(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut s), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut r = RngStream::new(1, 0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_pair_moments() {
        let mut r = RngStream::new(3, 0);
        let n = 200_000;
        let (mut sx, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let (a, b) = r.normal_pair();
            sx += a + b;
            sxx += a * a + b * b;
            sxy += a * b;
        }
        let m = 2.0 * n as f64;
        assert!((sx / m).abs() < 0.01);
        assert!((sxx / m - 1.0).abs() < 0.01);
        assert!((sxy / n as f64).abs() < 0.01);
    }
}
