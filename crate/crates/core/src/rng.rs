//! Deterministic substream derivation.
//!
//! Every source of randomness in the harness is a ChaCha8 stream derived from
//! `(master_seed, label, indices...)`. Derivation is a pure integer hash, so
//! the same key yields the same stream on every platform and every run. This
//! is what lets two different policies face the identical
//! (persona, bundle, buyer-noise) episode stream.
//!
//! Stream keys in use:
//! - `("persona-obs", [record_index])` — observable-profile sampling
//! - `("persona-hidden", [record_index])` — hidden-trait sampling
//! - `("bundle", [episode_index])` — per-episode bundle draw
//! - `("buyer", [episode_index, round])` — buyer noise and response draws
//! - `("policy", [episode_index])` — heuristic policy draws

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent seeded stream from a master seed, a component label,
/// and a list of indices (episode number, round number, ...).
pub fn substream(master_seed: u64, label: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut acc = mix64(master_seed ^ fnv1a64(label.as_bytes()));
    for &ix in indices {
        acc = mix64(acc ^ mix64(ix.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    ChaCha8Rng::seed_from_u64(acc)
}

/// Stream seeded directly from a bare integer (used by the bootstrap, whose
/// seed is part of the reported interval definition).
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample an index from a discrete distribution given as a probability row.
///
/// Rows are validated to sum to 1 at table load; the final bucket absorbs any
/// residual rounding mass.
pub fn pick(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rand::Rng::random(rng);
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}
