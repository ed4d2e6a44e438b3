//! Random number streams.
//!
//! Every stochastic routine draws from ChaCha20. A run is identified by a
//! 64-bit seed and each path of an ensemble by its index; the pair is mixed
//! into the key and the path index also selects the ChaCha stream, so paths
//! never share keystream and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type PathRng = ChaCha20Rng;

/// Identifier written to trace metadata.
pub const GENERATOR_ID: &str = "chacha20";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for path `index` of the run identified by `seed`.
pub fn substream(seed: u64, index: u64) -> PathRng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d));
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
