//! Turns raw tokenized posts into a model-ready corpus: stemming, TF-IDF
//! variance and rare-token filtering, then significance-tested n-gram
//! mining.

mod error;
mod ngram;
mod pipeline;
mod raw;
mod stem;
mod tfidf;

pub use error::{PreprocessError, Result};
pub use ngram::{mine_ngrams, poisson_upper_tail, test_ngram, Mined, NgramCandidate, NgramOptions};
pub use pipeline::{ngram_report_csv, preprocess, PreprocessOptions, Preprocessed};
pub use raw::{parse_raw, RawPost};
pub use stem::{known_stemmers, stemmer, Identity, Lowercase, Stemmer, STEMMERS};
pub use tfidf::{rare_token_filter, tfidf, variance_filter, TokenStats, VarianceFilter};
