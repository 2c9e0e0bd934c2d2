//! Deterministic seed derivation.
//!
//! Every stochastic component (splits, contamination swaps, ensemble
//! partitions, parameter init, batch shuffling) draws from its own stream
//! derived from one master seed, so runs reproduce end to end and adding
//! concurrency never changes results.

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive a child seed from `(master, tag, index)`.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(fnv1a(tag.as_bytes()) ^ splitmix64(index)))
}

/// Two-index variant for (split, seed) style grids.
pub fn derive_seed2(master: u64, tag: &str, a: u64, b: u64) -> u64 {
    derive_seed(derive_seed(master, tag, a), tag, b.wrapping_add(0x9E37))
}
