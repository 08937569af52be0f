//! Data model shared by the preprocessing, simulation, inference and
//! diagnostics crates.

pub mod adjacency;
pub mod config;
pub mod corpus;
pub mod draws;
pub mod error;
pub mod io;
pub mod math;
pub mod vocab;

pub use adjacency::AdjacencyTensor;
pub use config::ModelConfig;
pub use corpus::{Corpus, Post};
pub use draws::{PosteriorDraws, Snapshot};
pub use error::{Error, Result};
pub use vocab::{BlogIndex, Vocabulary};

/// The generator used everywhere; seeded runs are bit-reproducible.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}

/// Derives an independent seed for stream `index` (e.g. a chain) from a base
/// seed using the SplitMix64 finalizer.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
