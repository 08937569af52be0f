use std::collections::BTreeMap;
use std::fmt::Write as _;

use dtn_core::io::{parse_dataset, LoadOptions};
use dtn_core::{Corpus, Vocabulary};

use crate::error::{PreprocessError, Result};
use crate::ngram::{mine_ngrams, Mined, NgramOptions};
use crate::raw::RawPost;
use crate::stem::{known_stemmers, stemmer};
use crate::tfidf::{rare_token_filter, variance_filter, TokenStats, VarianceFilter};

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOptions {
    pub stemmer: String,
    pub variance: VarianceFilter,
    pub min_doc_fraction: f64,
    pub ngrams: NgramOptions,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            stemmer: "identity".into(),
            variance: VarianceFilter::default(),
            min_doc_fraction: 0.0002,
            ngrams: NgramOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Stemmed unigram vocabulary before filtering.
    pub unigrams: Vocabulary,
    pub removed_low_variance: usize,
    pub removed_rare: usize,
    pub mined: Mined,
    /// Surface form of every unit: unigram parts joined by `_`.
    pub unit_names: Vec<String>,
    /// Output in corpus file format.
    pub corpus_text: String,
    pub corpus: Corpus,
}

/// Stems, filters and mines `posts`. Filtered tokens are dropped from the
/// text and split it, so no n-gram spans a removed token.
pub fn preprocess(posts: &[RawPost], opts: &PreprocessOptions) -> Result<Preprocessed> {
    let stem = stemmer(&opts.stemmer).ok_or_else(|| PreprocessError::UnknownStemmer {
        name: opts.stemmer.clone(),
        known: known_stemmers(),
    })?;
    let mut unigrams = Vocabulary::new();
    let ids: Vec<Vec<u32>> = posts
        .iter()
        .map(|p| p.tokens.iter().map(|t| unigrams.intern(&stem.stem(t))).collect())
        .collect();
    if let Some(bad) = unigrams.tokens().iter().find(|t| t.is_empty() || t.contains(',')) {
        return Err(PreprocessError::Invalid(format!("stemmer produced unusable token {bad:?}")));
    }

    let stats = TokenStats::from_posts(ids.iter().map(Vec::as_slice), unigrams.len());
    let by_variance = variance_filter(&stats, opts.variance);
    let by_rarity = rare_token_filter(&stats, opts.min_doc_fraction);
    let present = |w: usize| stats.doc_freq[w] > 0;
    let removed_low_variance = (0..unigrams.len()).filter(|&w| present(w) && !by_variance[w]).count();
    let removed_rare = (0..unigrams.len())
        .filter(|&w| present(w) && by_variance[w] && !by_rarity[w])
        .count();
    let keep: Vec<bool> = by_variance.iter().zip(&by_rarity).map(|(a, b)| *a && *b).collect();

    let segmented: Vec<Vec<Vec<u32>>> = ids
        .iter()
        .map(|post| {
            post.split(|&w| !keep[w as usize])
                .filter(|s| !s.is_empty())
                .map(<[u32]>::to_vec)
                .collect()
        })
        .collect();
    let mined = mine_ngrams(segmented, unigrams.len(), &opts.ngrams);
    let unit_names: Vec<String> = mined
        .units
        .iter()
        .map(|parts| {
            parts
                .iter()
                .map(|&w| unigrams.token(w))
                .collect::<Vec<_>>()
                .join("_")
        })
        .collect();

    let mut corpus_text = String::new();
    for (raw, segs) in posts.iter().zip(&mined.posts) {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &u in segs.iter().flatten() {
            *counts.entry(u).or_default() += 1;
        }
        let tokens: Vec<String> = counts
            .iter()
            .map(|(&u, &c)| format!("{}:{c}", unit_names[u as usize]))
            .collect();
        let _ = writeln!(
            corpus_text,
            "{}\t{}\t{}\t{}",
            raw.day,
            raw.blog,
            tokens.join(","),
            raw.links.join(",")
        );
    }
    let (corpus, _) = parse_dataset(&corpus_text, None, &LoadOptions::default())?;
    Ok(Preprocessed {
        unigrams,
        removed_low_variance,
        removed_rare,
        mined,
        unit_names,
        corpus_text,
        corpus,
    })
}

/// Tested n-gram candidates as CSV: surface form, order, counts,
/// significance, decision and merges performed.
pub fn ngram_report_csv(p: &Preprocessed) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["ngram", "order", "observed", "expected", "significance", "accepted", "merges"])
        .expect("in-memory write");
    for c in &p.mined.candidates {
        let name = c
            .parts
            .iter()
            .map(|&t| p.unigrams.token(t))
            .collect::<Vec<_>>()
            .join("_");
        w.write_record([
            name,
            c.parts.len().to_string(),
            c.observed.to_string(),
            c.expected.to_string(),
            c.significance.to_string(),
            c.accepted.to_string(),
            c.merges.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
