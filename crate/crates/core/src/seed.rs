//! Deterministic seed derivation.
//!
//! Every derived seed is a pure function of its inputs so serial and parallel
//! runs see the same random streams. The mixer is the splitmix64 finalizer:
//!
//! ```text
//! z += 0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! and `derive_seed(master, a, b) = mix(mix(master ^ mix(a)) ^ b)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    mix(mix(master ^ mix(a)) ^ b)
}

/// The generator used everywhere a seed turns into randomness.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_values() {
        // Reference outputs of splitmix64 seeded with 0.
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    }
}
