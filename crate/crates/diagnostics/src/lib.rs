//! Post-hoc analysis of posterior draws: partition agreement, topic-count
//! selection, token timelines and parameter summaries.

mod ari;
mod arun;
mod error;
mod predictive;
mod select;
mod summary;

pub use ari::{adjusted_rand_index, ari_series};
pub use arun::{argmin, arun_criterion, arun_divergence, symmetric_kl, topic_word_counts};
pub use error::{DiagnosticsError, Result};
pub use predictive::{
    predictive_token_prob, predictive_topic_probs, weighted_frequencies, weighted_frequency, DayBand,
};
pub use select::{select_k, Selection, SelectionPoint};
pub use summary::{map_assignments, mixing_series, summarize, summarize_values, ParameterSummary, Summary};
