use dtn_core::{seeded_rng, BlogIndex, Corpus, Post, Vocabulary};
use dtn_inference::{topic_conditional, TextPrior, WindowCounts};
use proptest::prelude::*;
use rand::Rng as _;

fn corpus(posts: Vec<Post>, vocab: usize, horizon: u32) -> Corpus {
    let vocabulary = Vocabulary::from_tokens((0..vocab).map(|w| format!("w{w}"))).unwrap();
    Corpus::new(posts, vocabulary, BlogIndex::numbered(2), horizon).unwrap()
}

/// Log collapsed joint of labels and tokens for the posts in `members`,
/// built up one post and one token at a time as a Polya urn.
fn urn_joint(posts: &[&Post], z: &[usize], k_topics: usize, vocab: usize, prior: TextPrior) -> f64 {
    let mut m = vec![0.0; k_topics];
    let mut n = vec![0.0; k_topics];
    let mut nw = vec![vec![0.0; vocab]; k_topics];
    let mut acc = 0.0;
    for (seen, (post, &k)) in posts.iter().zip(z).enumerate() {
        acc += ((m[k] + prior.alpha) / (seen as f64 + k_topics as f64 * prior.alpha)).ln();
        m[k] += 1.0;
        for &(w, c) in &post.tokens {
            for _ in 0..c {
                acc += ((nw[k][w as usize] + prior.beta) / (n[k] + vocab as f64 * prior.beta)).ln();
                nw[k][w as usize] += 1.0;
                n[k] += 1.0;
            }
        }
    }
    acc
}

fn oracle(posts: &[&Post], z: &[usize], d: usize, k_topics: usize, vocab: usize, prior: TextPrior, xi: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = (0..k_topics)
        .map(|k| {
            let mut z = z.to_vec();
            z[d] = k;
            urn_joint(posts, &z, k_topics, vocab, prior) + xi[k].ln()
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn check_against_oracle(xi: &[f64]) {
    let prior = TextPrior { alpha: 0.3, beta: 0.2 };
    let vocab = 4;
    // the last post is outside the window of day 2 and must be ignored
    let posts = vec![
        Post::new(0, 1, [(0, 2), (1, 1)]),
        Post::new(1, 1, [(0, 1), (3, 3)]),
        Post::new(0, 2, [(2, 1), (1, 1), (0, 1)]),
        Post::new(1, 2, [(3, 2), (2, 2)]),
        Post::new(0, 4, [(1, 4)]),
    ];
    let c = corpus(posts, vocab, 4);
    let z = [0usize, 1, 1, 0, 1];
    let window: Vec<&Post> = c.posts()[..4].iter().collect();
    for d in 0..4 {
        let mut labels: Vec<Option<usize>> = z.iter().map(|&k| Some(k)).collect();
        labels[d] = None;
        let counts = WindowCounts::recount(&c, &labels, 2, 1, Some(2));
        let got = topic_conditional(&c.posts()[d], &counts, prior, &xi.iter().map(|x| x.ln()).collect::<Vec<_>>());
        let want = oracle(&window, &z[..4], d, 2, vocab, prior, xi);
        for k in 0..2 {
            let rel = (got[k] - want[k]).abs() / want[k];
            assert!(rel < 1e-10, "post {d} topic {k}: {} vs {}", got[k], want[k]);
        }
        assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn conditional_matches_collapsed_joint_with_flat_prior() {
    check_against_oracle(&[1.0, 1.0]);
}

#[test]
fn conditional_matches_collapsed_joint_with_topic_weights() {
    check_against_oracle(&[0.8, 0.2]);
}

#[test]
fn random_updates_keep_counts_consistent() {
    let mut rng = seeded_rng(7);
    let k_topics = 3;
    let posts: Vec<Post> = (0..60)
        .map(|d| {
            let toks: Vec<(u32, u32)> = (0..rng.random_range(1..5)).map(|_| (rng.random_range(0..12), rng.random_range(1..4))).collect();
            Post::new(d % 2, 1 + (d as u32 % 15), toks)
        })
        .collect();
    let c = corpus(posts, 12, 15);
    let mut z: Vec<Option<usize>> = vec![None; c.posts().len()];
    let mut counts = WindowCounts::new(k_topics, 12, 3, 15);
    for _ in 0..10_000 {
        match rng.random_range(0..3) {
            0 => {
                let d = rng.random_range(0..z.len());
                if z[d].is_none() {
                    let k = rng.random_range(0..k_topics);
                    counts.add(&c.posts()[d], k);
                    z[d] = Some(k);
                }
            }
            1 => {
                let d = rng.random_range(0..z.len());
                if let Some(k) = z[d].take() {
                    counts.remove(&c.posts()[d], k);
                }
            }
            _ => counts.focus(rng.random_range(1..=15)),
        }
    }
    counts.audit(&c, &z).unwrap();
}

proptest! {
    #[test]
    fn conditional_sums_to_one_and_ignores_token_labels(
        raw in proptest::collection::vec(proptest::collection::vec((0u32..5, 1u32..4), 1..4), 2..6),
        z in proptest::collection::vec(0usize..2, 6),
        perm_seed in any::<u64>(),
    ) {
        let prior = TextPrior { alpha: 0.1, beta: 0.1 };
        let mut perm: Vec<u32> = (0..5).collect();
        let mut rng = seeded_rng(perm_seed);
        for i in (1..5).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let build = |relabel: bool| {
            let posts = raw
                .iter()
                .map(|toks| Post::new(0, 1, toks.iter().map(|&(w, c)| (if relabel { perm[w as usize] } else { w }, c))))
                .collect();
            corpus(posts, 5, 1)
        };
        let (a, b) = (build(false), build(true));
        let mut labels: Vec<Option<usize>> = z[..raw.len()].iter().map(|&k| Some(k)).collect();
        labels[0] = None;
        let ca = WindowCounts::recount(&a, &labels, 2, 0, Some(1));
        let cb = WindowCounts::recount(&b, &labels, 2, 0, Some(1));
        let pa = topic_conditional(&a.posts()[0], &ca, prior, &[0.0, 0.0]);
        let pb = topic_conditional(&b.posts()[0], &cb, prior, &[0.0, 0.0]);
        prop_assert!((pa.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 0..2 {
            prop_assert!((pa[k] - pb[k]).abs() < 1e-12);
        }
    }
}
