//! Keyed random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(seed, replication, role, index)`. Two computations that use the same key
//! see the same numbers regardless of scheduling, which is what makes the
//! replication and subsample loops order-independent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for inside one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Design = 1,
    Path = 2,
    Noise = 3,
    Subsample = 4,
    Volume = 5,
    Auxiliary = 6,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for `(seed, replication, role, index)`.
pub fn stream(seed: u64, replication: u64, role: Role, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    let id = splitmix64(splitmix64(splitmix64(replication) ^ role as u64) ^ index);
    rng.set_stream(id);
    rng
}

/// Stream for a standalone computation that only has a seed.
pub fn from_seed(seed: u64) -> ChaCha8Rng {
    stream(seed, 0, Role::Auxiliary, 0)
}
