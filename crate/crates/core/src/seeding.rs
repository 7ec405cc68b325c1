//! Seed derivation for independent, reproducible RNG streams.
//!
//! Every randomised stage (weight init, shuffling, noise synthesis, bootstrap
//! draws) gets its own stream seed derived from one base seed, so reruns are
//! bit-identical and stages stay decorrelated even for adjacent base seeds.

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a stream tag.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    mix(base ^ mix(stream))
}

/// Folds several indices into one stream seed (e.g. per row/sigma/copy).
pub fn derive_seed_n(base: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(mix(base), |acc, &i| mix(acc ^ mix(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_stable_and_distinct() {
        assert_eq!(derive_seed(42, 1), derive_seed(42, 1));
        assert_ne!(derive_seed(42, 1), derive_seed(42, 2));
        assert_ne!(derive_seed(42, 1), derive_seed(43, 1));
    }

    #[test]
    fn index_folding_distinguishes_order() {
        assert_ne!(derive_seed_n(7, &[1, 2]), derive_seed_n(7, &[2, 1]));
        assert_eq!(derive_seed_n(7, &[3, 0, 2]), derive_seed_n(7, &[3, 0, 2]));
    }
}
