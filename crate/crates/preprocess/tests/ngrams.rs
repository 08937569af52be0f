use dtn_preprocess::{mine_ngrams, parse_raw, preprocess, test_ngram, NgramOptions, PreprocessOptions};

/// 600 posts "white house", 500 posts "x y", and 1500 more uses each of x
/// and y next to one of ten fillers. The parts of "white house" never occur
/// apart; x and y are adjacent at about the rate independence predicts.
fn planted_corpus() -> String {
    let mut lines = Vec::new();
    for i in 0..600 {
        lines.push(format!("{}\tb{}\twhite house", 1 + i % 5, i % 7));
    }
    for i in 0..500 {
        lines.push(format!("{}\tb{}\tx y", 1 + i % 5, i % 7));
    }
    for i in 0..1500 {
        lines.push(format!("{}\tb{}\tx f{}", 1 + i % 5, i % 7, i % 10));
        lines.push(format!("{}\tb{}\tg{} y", 1 + i % 5, i % 7, i % 10));
    }
    lines.join("\n")
}

#[test]
fn planted_pair_is_merged_and_independent_pair_rejected() {
    let raw = parse_raw(&planted_corpus()).unwrap();
    let out = preprocess(&raw, &PreprocessOptions::default()).unwrap();
    let name = |c: &dtn_preprocess::NgramCandidate| {
        c.parts.iter().map(|&w| out.unigrams.token(w)).collect::<Vec<_>>().join(" ")
    };
    let planted = out.mined.candidates.iter().find(|c| name(c) == "white house").unwrap();
    assert!(planted.accepted);
    assert_eq!(planted.merges, 600);
    let independent = out.mined.candidates.iter().find(|c| name(c) == "x y").unwrap();
    assert_eq!(independent.observed, 500);
    // 2000 uses of each part among 8200 tokens
    let expected = 2000.0 * 2000.0 / 8200.0;
    assert!((independent.expected - expected).abs() < 1e-9);
    assert!(independent.significance > 0.05);
    assert!(!independent.accepted);
    assert_eq!(out.mined.tokens_before, out.mined.tokens_after + out.mined.merges);

    let vocab = out.corpus.vocabulary();
    let id = vocab.id("white_house").unwrap();
    let total: u32 = out
        .corpus
        .posts()
        .iter()
        .flat_map(|p| &p.tokens)
        .filter(|t| t.0 == id)
        .map(|t| t.1)
        .sum();
    assert_eq!(total, 600);
    assert!(vocab.id("white").is_none());
}

#[test]
fn count_floor_rejects_a_significant_pair() {
    let seg: Vec<u32> = (0..499).flat_map(|_| [0, 1]).chain(2..200).collect();
    let mined = mine_ngrams(vec![vec![seg]], 200, &NgramOptions::default());
    assert!(mined.candidates.iter().all(|c| c.parts != [0, 1]));
    assert_eq!(mined.merges, 0);
}

#[test]
fn removed_tokens_break_adjacency() {
    // "the" is in every post once, so its variance is zero and it is dropped;
    // "a the b" must not become "a b"
    let mut lines = Vec::new();
    for i in 0..600 {
        lines.push(format!("1\tb{}\ta the b", i % 3));
    }
    let raw = parse_raw(&lines.join("\n")).unwrap();
    let out = preprocess(&raw, &PreprocessOptions::default()).unwrap();
    assert_eq!(out.removed_low_variance, 3);
    assert!(out.mined.candidates.is_empty());
}

#[test]
fn poisson_significance_examples() {
    assert_eq!(test_ngram(0, 1000, 0.01, 0.01).unwrap(), 1.0);
    assert!(test_ngram(5, 1000, 0.01, 0.01).unwrap() < 0.05);
    assert!(test_ngram(100, 10_000, 0.1, 0.1).unwrap() > 0.05);
}
