//! The reference pseudo-random generator.
//!
//! Everything seeded in this crate goes through ChaCha8 (`rand_chacha`),
//! whose output is specified and identical across platforms. Parallel work
//! derives one independent ChaCha stream per chunk or replica from the same
//! 64-bit seed, so results never depend on thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstream::Bitstream;

pub type ReferenceRng = ChaCha8Rng;

pub fn reference_rng(seed: u64) -> ReferenceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-task `stream` (chunk index, replica index, ...) of a
/// seeded computation.
pub fn stream_rng(seed: u64, stream: u64) -> ReferenceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `len` uniform bits from `rng`, 64 at a time.
pub fn random_bits<R: RngCore>(rng: &mut R, len: usize) -> Bitstream {
    let words = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    Bitstream::from_words(words, len)
}

pub fn reference_bits(len: usize, seed: u64) -> Bitstream {
    random_bits(&mut reference_rng(seed), len)
}
