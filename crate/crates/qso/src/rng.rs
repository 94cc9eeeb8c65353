//! Reproducible counter-based random streams.
//!
//! A [`RandomStream`] names a (master seed, stream id) pair. Distinct ids give
//! statistically independent ChaCha streams; identical pairs reproduce the
//! exact same draws. Substreams are derived arithmetically so that parallel
//! workers can each own a stream without any shared state, and results do not
//! depend on scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// A named position in the global family of random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

// SplitMix64 finalizer, used to decorrelate derived stream ids.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Root stream for a run.
    pub fn root(master_seed: u64) -> Self {
        Self::new(master_seed, 0)
    }

    /// Child stream `index` of this stream. Children of distinct parents and
    /// distinct indices land on distinct ChaCha streams (up to 64-bit mixing).
    pub fn substream(&self, index: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id: mix(self.stream_id).wrapping_add(mix(index ^ 0x5851f42d4c957f2d)),
        }
    }

    /// Instantiate the generator at this stream position.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
