//! Two-pass n-gram mining.
//!
//! Pass one tests every adjacent pair of unigrams against independence:
//! with `N` tokens and part shares `p_a`, `p_b`, the pair is expected
//! `N p_a p_b` times, and the significance is the Poisson upper tail of the
//! observed count. A pair is accepted when it is significant and frequent
//! enough. Accepted pairs are merged greedily left to right.
//!
//! Pass two pairs each accepted bigram with an adjacent unigram (trigram)
//! or bigram (quadrigram) and keeps combinations seen more than
//! `higher_min` times, again merging greedily.
//!
//! Text is a list of segments per post. Adjacency never crosses a segment
//! boundary.

use std::collections::{BTreeMap, HashMap};

use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{PreprocessError, Result};

/// `P(X >= observed)` for `X ~ Poisson(mean)`.
pub fn poisson_upper_tail(observed: u64, mean: f64) -> f64 {
    if observed == 0 {
        return 1.0;
    }
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean).expect("positive mean").sf(observed - 1)
}

/// Significance probability of a pair seen `observed` times among
/// `n_total` tokens whose parts have shares `p_a` and `p_b`.
pub fn test_ngram(observed: u64, n_total: u64, p_a: f64, p_b: f64) -> Result<f64> {
    if n_total == 0 {
        return Err(PreprocessError::Invalid("no tokens to test against".into()));
    }
    for p in [p_a, p_b] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(PreprocessError::Invalid(format!("part share {p} not in (0, 1]")));
        }
    }
    let expected = n_total as f64 * p_a * p_b;
    if expected == 0.0 && observed > 0 {
        log::warn!("pair seen {observed} times has zero expected count");
    }
    Ok(poisson_upper_tail(observed, expected))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramOptions {
    pub alpha: f64,
    pub bigram_min: u64,
    pub higher_min: u64,
}

impl Default for NgramOptions {
    fn default() -> Self {
        NgramOptions {
            alpha: 0.05,
            bigram_min: 500,
            higher_min: 100,
        }
    }
}

/// A tested combination of two units.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramCandidate {
    /// Unigram ids of the combined unit.
    pub parts: Vec<u32>,
    /// Adjacent occurrences when tested.
    pub observed: u64,
    pub expected: f64,
    pub significance: f64,
    pub accepted: bool,
    /// Occurrences actually rewritten; overlaps can make this smaller than
    /// `observed`.
    pub merges: u64,
}

/// Mined text: units replace unigrams, each unit a run of unigram ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Mined {
    /// `units[u]` lists the unigram ids of unit `u`; the first
    /// `vocab_size` units are the unigrams themselves.
    pub units: Vec<Vec<u32>>,
    /// Unit ids, per post, per segment.
    pub posts: Vec<Vec<Vec<u32>>>,
    /// Every candidate that cleared its count floor, in test order.
    pub candidates: Vec<NgramCandidate>,
    pub tokens_before: u64,
    pub tokens_after: u64,
    pub merges: u64,
}

type Text = Vec<Vec<Vec<u32>>>;

fn pair_counts(text: &Text, eligible: impl Fn(u32, u32) -> bool) -> BTreeMap<(u32, u32), u64> {
    let mut counts = BTreeMap::new();
    for seg in text.iter().flatten() {
        for p in seg.windows(2) {
            if eligible(p[0], p[1]) {
                *counts.entry((p[0], p[1])).or_default() += 1;
            }
        }
    }
    counts
}

fn unit_counts(text: &Text, n_units: usize) -> (Vec<u64>, u64) {
    let mut c = vec![0u64; n_units];
    let mut n = 0;
    for &u in text.iter().flatten().flatten() {
        c[u as usize] += 1;
        n += 1;
    }
    (c, n)
}

/// Rewrites adjacent accepted pairs as their merged unit, left to right.
fn rewrite(text: &mut Text, merged: &HashMap<(u32, u32), (u32, usize)>, candidates: &mut [NgramCandidate]) -> u64 {
    let mut merges = 0;
    for seg in text.iter_mut().flatten() {
        let mut out = Vec::with_capacity(seg.len());
        let mut i = 0;
        while i < seg.len() {
            if i + 1 < seg.len() {
                if let Some(&(unit, idx)) = merged.get(&(seg[i], seg[i + 1])) {
                    out.push(unit);
                    candidates[idx].merges += 1;
                    merges += 1;
                    i += 2;
                    continue;
                }
            }
            out.push(seg[i]);
            i += 1;
        }
        *seg = out;
    }
    merges
}

/// Runs both passes over `posts` (per post, per segment, unigram ids).
pub fn mine_ngrams(posts: Vec<Vec<Vec<u32>>>, vocab_size: usize, opts: &NgramOptions) -> Mined {
    let mut text = posts;
    let mut units: Vec<Vec<u32>> = (0..vocab_size as u32).map(|w| vec![w]).collect();
    let mut candidates = Vec::new();
    let (counts, n_total) = unit_counts(&text, units.len());
    let mut merges = 0;

    // pass one: unigram pairs
    let mut merged = HashMap::new();
    for ((a, b), observed) in pair_counts(&text, |_, _| true) {
        if observed < opts.bigram_min {
            continue;
        }
        let (pa, pb) = (counts[a as usize] as f64 / n_total as f64, counts[b as usize] as f64 / n_total as f64);
        let significance = test_ngram(observed, n_total, pa, pb).expect("parts occur");
        let accepted = significance <= opts.alpha;
        if accepted {
            merged.insert((a, b), (units.len() as u32, candidates.len()));
            units.push(vec![a, b]);
        }
        candidates.push(NgramCandidate {
            parts: vec![a, b],
            observed,
            expected: n_total as f64 * pa * pb,
            significance,
            accepted,
            merges: 0,
        });
    }
    merges += rewrite(&mut text, &merged, &mut candidates);

    // pass two: a bigram with a neighbouring unigram or bigram
    let is_bigram = |u: u32| units[u as usize].len() == 2;
    let pairs = pair_counts(&text, |a, b| is_bigram(a) || is_bigram(b));
    let (counts, n_units) = unit_counts(&text, units.len());
    let mut merged = HashMap::new();
    let mut new_units = Vec::new();
    for ((a, b), observed) in pairs {
        let (pa, pb) = (counts[a as usize] as f64 / n_units as f64, counts[b as usize] as f64 / n_units as f64);
        if observed < opts.higher_min {
            continue;
        }
        let accepted = observed > opts.higher_min;
        let parts: Vec<u32> = units[a as usize].iter().chain(&units[b as usize]).copied().collect();
        if accepted {
            merged.insert((a, b), ((units.len() + new_units.len()) as u32, candidates.len()));
            new_units.push(parts.clone());
        }
        candidates.push(NgramCandidate {
            parts,
            observed,
            expected: n_units as f64 * pa * pb,
            significance: test_ngram(observed, n_units, pa, pb).expect("parts occur"),
            accepted,
            merges: 0,
        });
    }
    units.extend(new_units);
    merges += rewrite(&mut text, &merged, &mut candidates);

    let tokens_after = text.iter().flatten().map(|s| s.len() as u64).sum();
    Mined {
        units,
        posts: text,
        candidates,
        tokens_before: n_total,
        tokens_after,
        merges,
    }
}
