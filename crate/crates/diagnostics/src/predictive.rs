//! Token-level topic summaries over the sliding window: the predictive
//! probability of a topic given a token, and the weighted frequency
//! proportion built from it.

use dtn_core::{Corpus, PosteriorDraws};
use dtn_inference::WindowCounts;

use crate::error::{DiagnosticsError, Result};
use crate::summary::{summarize_values, Summary};

/// `F_k(w)`: share of topic `k`'s window tokens that are `w`.
fn frequency(counts: &WindowCounts, k: usize, w: u32) -> Option<f64> {
    let total = counts.window_tokens(k);
    (total > 0).then(|| counts.window_word(k, w) as f64 / total as f64)
}

/// `P(Z = k | w in d)` for every topic, from counts focused on the day of
/// interest. The topic prior is each topic's share of window posts. `None`
/// when the token does not occur in the window.
pub fn predictive_topic_probs(counts: &WindowCounts, w: u32) -> Option<Vec<f64>> {
    let k_topics = counts.n_topics();
    let posts = counts.window_total_posts() as f64;
    if posts == 0.0 {
        return None;
    }
    let joint: Vec<f64> = (0..k_topics)
        .map(|k| frequency(counts, k, w).unwrap_or(0.0) * counts.window_posts(k) as f64 / posts)
        .collect();
    let evidence: f64 = joint.iter().sum();
    (evidence > 0.0).then(|| joint.iter().map(|j| j / evidence).collect())
}

/// Weighted frequency proportion of every token in topic `k`; sums to 1.
/// `None` when the topic has no tokens in the window.
pub fn weighted_frequencies(counts: &WindowCounts, k: usize) -> Option<Vec<f64>> {
    if counts.window_tokens(k) == 0 {
        return None;
    }
    let row = counts.window_row(k);
    let mut wf: Vec<f64> = row
        .iter()
        .enumerate()
        .map(|(w, &n)| {
            if n == 0 {
                0.0
            } else {
                let p = predictive_topic_probs(counts, w as u32).map_or(0.0, |p| p[k]);
                p * frequency(counts, k, w as u32).unwrap_or(0.0)
            }
        })
        .collect();
    let total: f64 = wf.iter().sum();
    if total <= 0.0 {
        return None;
    }
    wf.iter_mut().for_each(|x| *x /= total);
    Some(wf)
}

/// Posterior band of a per-day quantity; `None` where it is undefined in
/// every draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DayBand {
    pub day: u32,
    pub band: Option<Summary>,
}

fn check_days(corpus: &Corpus, days: &[u32]) -> Result<()> {
    for &day in days {
        if day < 1 || day > corpus.horizon() {
            return Err(DiagnosticsError::DayOutOfRange {
                day,
                horizon: corpus.horizon(),
            });
        }
    }
    Ok(())
}

/// Runs `f` on window counts focused on each requested day, for every draw.
/// `days` must be ascending.
fn over_draws<T>(
    corpus: &Corpus,
    draws: &PosteriorDraws,
    ell: u32,
    days: &[u32],
    mut f: impl FnMut(usize, &WindowCounts) -> T,
) -> Result<Vec<Vec<T>>> {
    check_days(corpus, days)?;
    if draws.snapshots.is_empty() {
        return Err(DiagnosticsError::Empty("posterior draws"));
    }
    let mut per_day: Vec<Vec<T>> = days.iter().map(|_| Vec::new()).collect();
    for snap in &draws.snapshots {
        let z: Vec<Option<usize>> = snap.z.iter().map(|&k| Some(k)).collect();
        let mut counts = WindowCounts::recount(corpus, &z, draws.n_topics, ell, None);
        for (slot, &day) in days.iter().enumerate() {
            counts.focus(day);
            per_day[slot].push(f(slot, &counts));
        }
    }
    Ok(per_day)
}

fn bands(days: &[u32], values: Vec<Vec<Option<f64>>>) -> Vec<DayBand> {
    days.iter()
        .zip(values)
        .map(|(&day, v)| {
            let defined: Vec<f64> = v.into_iter().flatten().collect();
            DayBand {
                day,
                band: summarize_values(&defined),
            }
        })
        .collect()
}

/// `P(Z = k | w in d)` across draws on each of `days` (ascending).
pub fn predictive_token_prob(
    corpus: &Corpus,
    draws: &PosteriorDraws,
    ell: u32,
    w: u32,
    k: usize,
    days: &[u32],
) -> Result<Vec<DayBand>> {
    let values = over_draws(corpus, draws, ell, days, |_, c| predictive_topic_probs(c, w).map(|p| p[k]))?;
    Ok(bands(days, values))
}

/// Weighted frequency proportion of each token in `tokens` for topic `k`,
/// across draws, on each of `days` (ascending). Indexed `[token][day]`.
pub fn weighted_frequency(
    corpus: &Corpus,
    draws: &PosteriorDraws,
    ell: u32,
    k: usize,
    tokens: &[u32],
    days: &[u32],
) -> Result<Vec<Vec<DayBand>>> {
    let values = over_draws(corpus, draws, ell, days, |_, c| {
        let wf = weighted_frequencies(c, k);
        tokens
            .iter()
            .map(|&w| wf.as_ref().map(|v| v[w as usize]))
            .collect::<Vec<_>>()
    })?;
    Ok(tokens
        .iter()
        .enumerate()
        .map(|(ti, _)| {
            let per_token: Vec<Vec<Option<f64>>> = values
                .iter()
                .map(|day| day.iter().map(|draw| draw[ti]).collect())
                .collect();
            bands(days, per_token)
        })
        .collect())
}
