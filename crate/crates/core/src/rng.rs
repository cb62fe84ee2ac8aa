//! Seeded, portable random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by the
//! user seed, with a distinct stream id per purpose. Adding a draw to one
//! purpose therefore never shifts the numbers another purpose sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    InformativeIndices = 1,
    CorrelationInformative = 2,
    CorrelationRest = 3,
    Means = 4,
    Scales = 5,
    Samples = 6,
    LabelWeights = 7,
    Correlation = 8,
    RandomInstance = 9,
    /// Solver shots use `SolverShots as u64 + shot` so each shot is independent.
    SolverShots = 1 << 32,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    stream_rng_raw(seed, stream as u64)
}

pub fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    stream_rng_raw(seed, Stream::SolverShots as u64 + shot as u64)
}

fn stream_rng_raw(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
