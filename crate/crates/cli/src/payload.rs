//! Payload sources and bit packing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the generator behind random payloads, recorded in bench output.
pub const PRNG_NAME: &str = "ChaCha8";

/// Deterministic random payload; the length is folded into the seed so
/// different payload sizes are not prefixes of each other.
pub fn random_bits(nbits: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(nbits as u64));
    (0..nbits).map(|_| rng.gen()).collect()
}

/// Bits of `bytes`, most significant bit first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect()
}

/// Packs bits most significant first; a partial last byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}
