//! Collapsed topic assignment for a single post.
//!
//! The text part of the conditional is the Dirichlet-multinomial mixture
//! score computed against the sliding-window counts; it is multiplied by the
//! augmentation weights `xi_k`, proportional to the post rate of the blog on
//! topic `k` that day.

use dtn_core::math::{ln_rising, normalize_log_weights, sample_categorical};
use dtn_core::Post;
use rand::Rng;

use crate::window::WindowCounts;

/// Hyperparameters of the text score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextPrior {
    pub alpha: f64,
    pub beta: f64,
}

/// Log of the unnormalised text score of `post` under topic `k`.
///
/// `counts` must be focused on the post's day with the post itself removed;
/// `others` is the number of other posts in the window (`|D| - 1`).
pub fn text_log_score(post: &Post, k: usize, counts: &WindowCounts, prior: TextPrior, others: u32) -> f64 {
    let n_topics = counts.n_topics() as f64;
    let vocab = counts.vocab_size() as f64;
    let mut score = (counts.window_posts(k) as f64 + prior.alpha).ln()
        - (others as f64 + n_topics * prior.alpha).ln();
    let row = counts.window_row(k);
    for &(w, c) in &post.tokens {
        score += ln_rising(row[w as usize] as f64 + prior.beta, c);
    }
    score -= ln_rising(
        counts.window_tokens(k) as f64 + vocab * prior.beta,
        post.total_tokens,
    );
    score
}

/// Normalised augmentation weights from the per-topic rates
/// `pi_ik + E_tk psi_k`; uniform when every rate is zero.
pub fn augmentation_weights(rates: &[f64]) -> Vec<f64> {
    let total: f64 = rates.iter().sum();
    if total > 0.0 && total.is_finite() {
        rates.iter().map(|r| r / total).collect()
    } else {
        vec![1.0 / rates.len() as f64; rates.len()]
    }
}

/// Full conditional over topics for `post`, as probabilities.
///
/// `log_xi` holds `ln xi_k`; pass zeros for a flat prior over topics.
pub fn topic_conditional(post: &Post, counts: &WindowCounts, prior: TextPrior, log_xi: &[f64]) -> Vec<f64> {
    let others = counts.window_total_posts();
    let mut w: Vec<f64> = (0..counts.n_topics())
        .map(|k| text_log_score(post, k, counts, prior, others) + log_xi[k])
        .collect();
    if !normalize_log_weights(&mut w) {
        // every topic ruled out by xi: fall back to the text alone
        w = (0..counts.n_topics())
            .map(|k| text_log_score(post, k, counts, prior, others))
            .collect();
        normalize_log_weights(&mut w);
    }
    w
}

/// Samples a topic for `post`, which must not currently be in `counts`.
/// The post is added back under the sampled topic.
pub fn assign_topic<R: Rng + ?Sized>(
    post: &Post,
    counts: &mut WindowCounts,
    prior: TextPrior,
    log_xi: &[f64],
    rng: &mut R,
) -> usize {
    let probs = topic_conditional(post, counts, prior, log_xi);
    let k = sample_categorical(&probs, rng);
    counts.add(post, k);
    k
}
