//! Seed derivation and counter-based edge sampling.
//!
//! Topology generation and trial streams use `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64`. Per-edge uniforms inside a Monte-Carlo trial
//! come from the SplitMix64 finalizer applied to (trial key, edge id), so a
//! base edge has the same state in every overlay sampled with the same seed.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of integers into one seed. Order matters.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

/// Uniform in `[0, 1)` for edge `edge` of the trial identified by `key`.
pub fn edge_uniform(key: u64, edge: usize) -> f64 {
    let bits = splitmix64(key ^ (edge as u64).wrapping_mul(GOLDEN));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
