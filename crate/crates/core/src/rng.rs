//! Reproducible random streams.
//!
//! A stream is a ChaCha12 generator keyed from `(seed, lane)` and positioned
//! on the 64-bit ChaCha stream `stream_id`. Distinct stream ids (or lanes)
//! never share keystream, so Monte Carlo work partitioned by stream id is
//! reproducible regardless of how many threads execute it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha12Rng;

/// Default environment variable consulted for a seed by the CLI.
pub const SEED_ENV: &str = "GREYSIM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
    #[serde(default)]
    lane: u32,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            lane: 0,
        }
    }

    /// Sibling stream for an independent purpose (e.g. mixing draw vs driver).
    pub fn lane(&self, lane: u32) -> Self {
        Self { lane, ..*self }
    }

    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self { stream_id, ..*self }
    }

    pub fn rng(&self) -> StreamRng {
        let mut state = self.seed ^ (u64::from(self.lane) << 32 | 0x5EED);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Splits `total` items over `streams` shards; shard `i` gets the first
/// `total % streams` extra items.
pub fn shard_sizes(total: usize, streams: usize) -> Vec<usize> {
    let streams = streams.max(1);
    let base = total / streams;
    let extra = total % streams;
    (0..streams).map(|i| base + usize::from(i < extra)).collect()
}

/// Runs `work(rng, count)` once per shard in parallel and concatenates the
/// outputs in shard order.
pub fn par_shards<T, F>(seed: u64, streams: usize, total: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> Vec<T> + Sync,
{
    let sizes = shard_sizes(total, streams);
    let parts: Vec<Vec<T>> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &count)| {
            let mut rng = RngStream::new(seed, i as u64).rng();
            work(&mut rng, count)
        })
        .collect();
    parts.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_streams_reproduce() {
        let a: Vec<u64> = (0..16).map({
            let mut r = RngStream::new(7, 3).rng();
            move |_| r.random()
        }).collect();
        let mut r = RngStream::new(7, 3).rng();
        let b: Vec<u64> = (0..16).map(|_| r.random()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_and_lanes_differ() {
        let first = |s: RngStream| s.rng().random::<u64>();
        let base = RngStream::new(7, 3);
        assert_ne!(first(base), first(base.with_stream(4)));
        assert_ne!(first(base), first(base.lane(1)));
        assert_ne!(first(base), first(RngStream::new(8, 3)));
    }

    #[test]
    fn shard_sizes_sum() {
        assert_eq!(shard_sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(shard_sizes(10, 0), vec![10]);
    }

    #[test]
    fn par_shards_deterministic() {
        let run = || par_shards(1, 5, 103, |rng, n| (0..n).map(|_| rng.random::<u32>()).collect());
        let a = run();
        assert_eq!(a.len(), 103);
        assert_eq!(a, run());
    }
}

/// Seed and shard count for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub seed: u64,
    pub streams: usize,
}

impl MonteCarlo {
    pub fn new(seed: u64, streams: usize) -> Self {
        Self {
            seed,
            streams: streams.max(1),
        }
    }

    pub fn shards<T, F>(&self, total: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut StreamRng, usize) -> Vec<T> + Sync,
    {
        par_shards(self.seed, self.streams, total, work)
    }

    /// Same partition, but each shard receives its `RngStream` rather than a
    /// live generator (for samplers that need several lanes).
    pub fn stream_shards<T, F>(&self, total: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(RngStream, usize) -> Vec<T> + Sync,
    {
        let sizes = shard_sizes(total, self.streams);
        let parts: Vec<Vec<T>> = sizes
            .par_iter()
            .enumerate()
            .map(|(i, &count)| work(RngStream::new(self.seed, i as u64), count))
            .collect();
        parts.into_iter().flatten().collect()
    }
}
