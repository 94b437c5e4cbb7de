//! Counter-based seed derivation.
//!
//! Every random stream in a run is keyed by `(master seed, purpose, repetition,
//! group)`, so adding or removing a group never perturbs the randomness seen
//! by any other group.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, purpose: &str, rep: u64, group: &str) -> u64 {
    let mut h = mix(master);
    h = mix(h ^ fnv1a(purpose.as_bytes()));
    h = mix(h ^ rep);
    mix(h ^ fnv1a(group.as_bytes()))
}

pub fn rng_for(master: u64, purpose: &str, rep: u64, group: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, purpose, rep, group))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_separates_keys() {
        let s = derive_seed(7, "baseline", 0, "g1");
        assert_eq!(s, derive_seed(7, "baseline", 0, "g1"));
        assert_ne!(s, derive_seed(7, "baseline", 1, "g1"));
        assert_ne!(s, derive_seed(7, "baseline", 0, "g2"));
        assert_ne!(s, derive_seed(7, "group", 0, "g1"));
        assert_ne!(s, derive_seed(8, "baseline", 0, "g1"));
    }
}
