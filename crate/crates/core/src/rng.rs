//! Seeded random streams.
//!
//! Every stochastic operation draws from a [`Stream`]: a ChaCha8 generator
//! addressed by `(seed, stream index)`. Work that is split into chunks uses one
//! derived stream per chunk, so results depend on the seed and the chunk
//! layout only, never on thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per chunk in chunked runs. Part of the reproducibility contract:
/// changing it changes every chunked result.
pub const CHUNK_LEN: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
    draws: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self::derived(seed, 0)
    }

    /// Independent stream `index` under `seed`.
    pub fn derived(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng, draws: 0 }
    }

    /// Uniform variate on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    /// Draws a 64-bit seed for a family of child streams. Counts as one variate.
    pub fn fork_seed(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Number of variates consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// Splits `n` trials into chunks of [`CHUNK_LEN`], runs `work(chunk_index,
/// first_trial, count, stream)` on each with stream `(seed, chunk_index)`, and
/// returns the per-chunk results in chunk order.
pub fn chunked<T, F>(seed: u64, n: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, u64, &mut Stream) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_LEN);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK_LEN;
            let count = CHUNK_LEN.min(n - start);
            let mut stream = Stream::derived(seed, k);
            work(k, start, count, &mut stream)
        })
        .collect()
}
