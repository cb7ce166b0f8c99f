//! Shared fixtures for the benchmarks.

use obcs::constructions::{sample_random_ruff, RandomRuffConfig, SampledFamily};
use obcs::Fraction;

/// A verified family with the default constants and `alpha = 1/2`.
pub fn verified_family(n: usize, k: usize, seed: u64) -> SampledFamily {
    let config = RandomRuffConfig::new(n, k, Fraction::HALF, seed);
    sample_random_ruff(&config).expect("default constants verify at benchmark sizes")
}
