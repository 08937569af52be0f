//! Per-token TF-IDF statistics and the two vocabulary filters.
//!
//! The score of token `w` in post `d` is `f_wd / n_w`, where `n_w` is the
//! number of posts containing `w`. A token used at the same rate everywhere
//! scores the same in every post and has zero variance.

use crate::error::{PreprocessError, Result};

pub fn tfidf(f_wd: u32, n_w: u32) -> Result<f64> {
    if n_w == 0 {
        return Err(PreprocessError::UndefinedToken(0));
    }
    Ok(f_wd as f64 / n_w as f64)
}

/// Corpus-wide statistics of every token id.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenStats {
    pub n_posts: u64,
    /// `n_w`
    pub doc_freq: Vec<u64>,
    /// `sum_d f_wd`
    pub total: Vec<u64>,
    /// `sum_d f_wd^2`
    pub total_sq: Vec<u64>,
}

impl TokenStats {
    /// Posts are given as token-id sequences; repeated ids are repeated uses.
    pub fn from_posts<'a>(posts: impl IntoIterator<Item = &'a [u32]>, vocab_size: usize) -> Self {
        let mut s = TokenStats {
            n_posts: 0,
            doc_freq: vec![0; vocab_size],
            total: vec![0; vocab_size],
            total_sq: vec![0; vocab_size],
        };
        let mut f = vec![0u64; vocab_size];
        let mut seen = Vec::new();
        for post in posts {
            s.n_posts += 1;
            for &w in post {
                if f[w as usize] == 0 {
                    seen.push(w);
                }
                f[w as usize] += 1;
            }
            for &w in &seen {
                let c = std::mem::take(&mut f[w as usize]);
                s.doc_freq[w as usize] += 1;
                s.total[w as usize] += c;
                s.total_sq[w as usize] += c * c;
            }
            seen.clear();
        }
        s
    }

    pub fn vocab_size(&self) -> usize {
        self.doc_freq.len()
    }

    /// Population variance of the TF-IDF score of `w` over all posts.
    /// Computed from integer sums, so it does not depend on post order.
    pub fn variance(&self, w: u32) -> f64 {
        let w = w as usize;
        let (n, d) = (self.doc_freq[w] as u128, self.n_posts as u128);
        if n == 0 || d == 0 {
            return 0.0;
        }
        let f = self.total[w] as u128;
        let num = d * self.total_sq[w] as u128 - f * f;
        num as f64 / (n * n * d * d) as f64
    }
}

/// How the variance filter picks its cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceFilter {
    /// Keep tokens whose variance exceeds the value.
    Threshold(f64),
    /// Keep this fraction of the vocabulary, highest variance first; ties
    /// go to the lower id. Zero-variance tokens are never kept.
    KeepTop(f64),
}

impl Default for VarianceFilter {
    fn default() -> Self {
        VarianceFilter::Threshold(0.0)
    }
}

/// Tokens retained by the variance filter, as a mask over ids.
pub fn variance_filter(stats: &TokenStats, mode: VarianceFilter) -> Vec<bool> {
    let var: Vec<f64> = (0..stats.vocab_size() as u32).map(|w| stats.variance(w)).collect();
    match mode {
        VarianceFilter::Threshold(t) => var.iter().map(|&v| v > t).collect(),
        VarianceFilter::KeepTop(frac) => {
            let n_keep = (frac.clamp(0.0, 1.0) * var.len() as f64).ceil() as usize;
            let mut order: Vec<usize> = (0..var.len()).collect();
            order.sort_by(|&a, &b| var[b].total_cmp(&var[a]).then(a.cmp(&b)));
            let mut keep = vec![false; var.len()];
            for &w in order.iter().take(n_keep) {
                keep[w] = var[w] > 0.0;
            }
            keep
        }
    }
}

/// Tokens used in at least `min_doc_fraction` of the posts. The cutoff is
/// strict: a token exactly at the fraction is kept.
pub fn rare_token_filter(stats: &TokenStats, min_doc_fraction: f64) -> Vec<bool> {
    stats
        .doc_freq
        .iter()
        .map(|&n| n > 0 && !((n as f64 / stats.n_posts as f64) < min_doc_fraction))
        .collect()
}
