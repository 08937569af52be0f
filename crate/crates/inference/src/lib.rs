//! Posterior sampling for the dynamic text network model.
//!
//! Topic assignments are drawn with a collapsed, window-based mixture
//! update; interests, post rates, events and event boosts by
//! Metropolis-Hastings; link coefficients by a component-wise random walk;
//! block labels by Gibbs sampling over the admissible blocks.

pub mod gsdmm;
pub mod sampler;
pub mod stages;
pub mod state;
pub mod window;

pub use gsdmm::{assign_topic, augmentation_weights, text_log_score, topic_conditional, TextPrior};
pub use sampler::{run_sampler, InferenceError, IterationRecord, RunOptions, RunOutput};
pub use stages::{pipeline, stage, Stage, StageStats, StepAdapter, Sweep, STAGES};
pub use state::{Model, SamplerState};
pub use window::WindowCounts;
