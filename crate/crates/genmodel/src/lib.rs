//! Generative model for dynamic text networks: drifting topics, topic
//! events, topic-interest blocks, Poisson posting and logistic links.

pub mod blocks;
pub mod network;
pub mod simulate;
pub mod topics;

pub use blocks::{block_index, block_prior, BlockCatalog, BlockPrior};
pub use network::{
    block_similarity, link_probability, Coefficients, Covariates, NetworkHistory,
    ObservedCovariates,
};
pub use simulate::{simulate, GroundTruth, LatentState, Scenario, Simulation};
pub use topics::{sample_topic_chain, TopicChain};
