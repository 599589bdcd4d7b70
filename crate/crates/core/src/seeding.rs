//! Deterministic derivation of independent random streams from one master
//! seed, so Monte Carlo runs can execute in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes mixed into the derived seed.
#[derive(Clone, Copy, Debug)]
pub enum Stream {
    /// Measurement simulation of sensor `i`.
    Sensor(usize),
    /// Filter-internal sampling (particle prediction, resampling).
    Filter,
    /// Ground-truth process noise.
    Truth,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Sensor(i) => 0x1000 + i as u64,
            Stream::Filter => 0x2000,
            Stream::Truth => 0x3000,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(master, run, stream)`.
pub fn derive_seed(master: u64, run: u64, stream: Stream) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ run) ^ stream.tag())
}

pub fn stream_rng(master: u64, run: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, run, stream))
}
