//! Deterministic, splittable random streams.
//!
//! All randomized operations take an explicit [`RngStream`]. A stream is a
//! `(master_seed, stream_id)` pair mapped onto a ChaCha8 counter stream, so
//! identical pairs reproduce the exact same draws on every platform, and
//! distinct stream ids give statistically independent sequences. Parallel
//! callers derive disjoint child streams with [`RngStream::substream`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A reproducible random stream identified by `(master_seed, stream_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn new(master_seed: u64) -> Self {
        RngStream {
            master_seed,
            stream_id: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derive a child stream. Children with distinct salts are disjoint,
    /// and deriving along different paths (salt sequences) never collides
    /// in practice: ids are mixed through SplitMix64.
    pub fn substream(&self, salt: u64) -> Self {
        let mixed = splitmix64(
            self.stream_id
                .wrapping_mul(0xA24B_AED4_963E_E407)
                .wrapping_add(splitmix64(salt.wrapping_add(0x9E37_79B9_7F4A_7C15))),
        );
        RngStream {
            master_seed: self.master_seed,
            stream_id: mixed,
        }
    }

    /// Materialize the stream as a ChaCha8 generator positioned at the start
    /// of its counter stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// `n` independent standard normal draws.
    pub fn normal_vec(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    /// `n` independent uniform draws on `[0, 1)`.
    pub fn uniform_vec(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| rng.random::<f64>()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_are_bitwise_identical() {
        let a = RngStream::new(42).substream(7);
        let b = RngStream::new(42).substream(7);
        assert_eq!(a.normal_vec(100), b.normal_vec(100));
        assert_eq!(a.uniform_vec(100), b.uniform_vec(100));
    }

    #[test]
    fn distinct_salts_give_distinct_draws() {
        let root = RngStream::new(42);
        let a = root.substream(1).uniform_vec(8);
        let b = root.substream(2).uniform_vec(8);
        assert_ne!(a, b);
    }

    #[test]
    fn nested_derivation_differs_from_sibling() {
        let root = RngStream::new(1);
        let a = root.substream(1).substream(2);
        let b = root.substream(2).substream(1);
        assert_ne!(a.stream_id(), b.stream_id());
    }
}
