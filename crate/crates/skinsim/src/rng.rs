//! Seed derivation for reproducible simulations.
//!
//! Every stochastic component owns its own stream, seeded from a master seed
//! by fixed arithmetic. Results are therefore independent of evaluation order
//! and of how work is scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams for unrelated purposes disjoint even when their
/// indices collide.
#[derive(Debug, Clone, Copy)]
pub enum SeedDomain {
    TaxelNoise,
    BenchTrial,
    ForestTree,
    DatasetSplit,
    Scenario,
    Placement,
}

impl SeedDomain {
    fn tag(self) -> u64 {
        match self {
            SeedDomain::TaxelNoise => 0x7461_7865, // "taxe"
            SeedDomain::BenchTrial => 0x6265_6e63, // "benc"
            SeedDomain::ForestTree => 0x7472_6565, // "tree"
            SeedDomain::DatasetSplit => 0x7370_6c74, // "splt"
            SeedDomain::Scenario => 0x7363_656e,   // "scen"
            SeedDomain::Placement => 0x706c_6163,  // "plac"
        }
    }
}

/// SplitMix64 finalizer; decorrelates nearby (seed, index) pairs.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed, a domain tag and an index.
pub fn derive_seed(master: u64, domain: SeedDomain, index: u64) -> u64 {
    mix(master ^ mix(domain.tag()) ^ mix(index.wrapping_mul(0x5851_f42d_4c95_7f2d)))
}

/// The one RNG used throughout the crate.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
