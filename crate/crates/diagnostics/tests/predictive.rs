use dtn_core::{BlogIndex, Corpus, PosteriorDraws, Post, Snapshot, Vocabulary};
use dtn_diagnostics::{predictive_token_prob, predictive_topic_probs, weighted_frequencies, weighted_frequency};
use dtn_inference::WindowCounts;

// tokens a=0, b=1, c=2
fn corpus(posts: Vec<Post>, horizon: u32) -> Corpus {
    let vocab = Vocabulary::from_tokens(["a", "b", "c"]).unwrap();
    Corpus::new(posts, vocab, BlogIndex::numbered(2), horizon).unwrap()
}

fn toy() -> (Corpus, Vec<usize>) {
    let posts = vec![
        Post::new(0, 1, [(0, 2), (1, 1)]),
        Post::new(1, 1, [(0, 1)]),
        Post::new(0, 1, [(1, 1), (2, 3)]),
    ];
    (corpus(posts, 1), vec![0, 0, 1])
}

fn counts(c: &Corpus, z: &[usize], k: usize, day: u32) -> WindowCounts {
    let z: Vec<Option<usize>> = z.iter().map(|&x| Some(x)).collect();
    WindowCounts::recount(c, &z, k, 0, Some(day))
}

fn snapshot(z: Vec<usize>) -> Snapshot {
    Snapshot {
        iteration: 0,
        z,
        b: vec![0, 0],
        pi: vec![vec![0.5, 0.5]; 2],
        rho: vec![1.0; 2],
        events: vec![vec![false]; 2],
        psi: vec![0.0; 2],
        theta: [0.0; 5],
    }
}

#[test]
fn hand_computed_predictive_probabilities() {
    // topic 0 holds 2 posts with a,a,b,a; topic 1 one post with b,c,c,c
    let (c, z) = toy();
    let w = counts(&c, &z, 2, 1);
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() < 1e-12);
    assert!(close(&predictive_topic_probs(&w, 0).unwrap(), &[1.0, 0.0]));
    assert!(close(&predictive_topic_probs(&w, 1).unwrap(), &[2.0 / 3.0, 1.0 / 3.0]));
    assert!(close(&predictive_topic_probs(&w, 2).unwrap(), &[0.0, 1.0]));
}

#[test]
fn hand_computed_weighted_frequencies() {
    let (c, z) = toy();
    let w = counts(&c, &z, 2, 1);
    let wf0 = weighted_frequencies(&w, 0).unwrap();
    let wf1 = weighted_frequencies(&w, 1).unwrap();
    let want0 = [9.0 / 11.0, 2.0 / 11.0, 0.0];
    let want1 = [0.0, 0.1, 0.9];
    for i in 0..3 {
        assert!((wf0[i] - want0[i]).abs() < 1e-12);
        assert!((wf1[i] - want1[i]).abs() < 1e-12);
    }
}

#[test]
fn symmetric_topics_split_a_shared_token_evenly() {
    let posts = vec![Post::new(0, 1, [(0, 1), (1, 1)]), Post::new(1, 1, [(0, 1), (2, 1)])];
    let c = corpus(posts, 1);
    let w = counts(&c, &[0, 1], 2, 1);
    let p = predictive_topic_probs(&w, 0).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
}

#[test]
fn single_token_topic() {
    let posts = vec![Post::new(0, 1, [(2, 4)]), Post::new(1, 1, [(0, 1), (1, 2)])];
    let c = corpus(posts, 1);
    let w = counts(&c, &[0, 1], 2, 1);
    assert_eq!(predictive_topic_probs(&w, 2).unwrap()[0], 1.0);
    assert_eq!(weighted_frequencies(&w, 0).unwrap(), vec![0.0, 0.0, 1.0]);
    let wf1 = weighted_frequencies(&w, 1).unwrap();
    assert!((wf1.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn undefined_outside_the_window() {
    let posts = vec![Post::new(0, 1, [(0, 1)]), Post::new(1, 5, [(1, 1)])];
    let c = corpus(posts, 5);
    let w = counts(&c, &[0, 1], 2, 5);
    assert!(predictive_topic_probs(&w, 0).is_none());
    assert!(weighted_frequencies(&w, 0).is_none());
}

#[test]
fn bands_over_draws() {
    let (c, _) = toy();
    let draws = PosteriorDraws {
        n_topics: 2,
        snapshots: vec![snapshot(vec![0, 0, 1]), snapshot(vec![0, 1, 1])],
    };
    // draw 1 gives 2/3 as above; draw 2 gives topic 0 one post a,a,b and
    // topic 1 two posts a,b,c,c,c: F0(b) = 1/3, F1(b) = 1/5, joints 1/9 and 2/15
    let band = predictive_token_prob(&c, &draws, 0, 1, 0, &[1]).unwrap();
    let second = (1.0 / 9.0) / (1.0 / 9.0 + 2.0 / 15.0);
    let s = band[0].band.unwrap();
    assert!((s.mean - (2.0 / 3.0 + second) / 2.0).abs() < 1e-12);
    assert_eq!(s.hi, 2.0 / 3.0);
    let wf = weighted_frequency(&c, &draws, 0, 0, &[0, 2], &[1]).unwrap();
    assert_eq!(wf.len(), 2);
    assert_eq!(wf[1][0].band.unwrap().mean, 0.0);
    assert!(predictive_token_prob(&c, &draws, 0, 1, 0, &[2]).is_err());
    assert!(predictive_token_prob(&c, &PosteriorDraws::new(2), 0, 1, 0, &[1]).is_err());
}
