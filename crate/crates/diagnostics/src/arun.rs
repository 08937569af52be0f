//! Topic-count selection by the divergence between two views of topic
//! mass.
//!
//! For a fitted assignment, let `M` be the topic-token count matrix with
//! `beta` added to every cell. `CM1` is the vector of singular values of
//! `M` with each row scaled to sum to one (the topic-token distributions).
//! `CM2` is the vector of row sums of `M`, i.e. the topic shares weighted by
//! post length. Both are normalised to sum to one and sorted in decreasing
//! order, and the criterion is the symmetric Kullback-Leibler divergence
//! between them. Splitting a coherent topic in two produces near-parallel
//! rows whose second singular value collapses while their token mass does
//! not, so over-fitted `K` is penalised.

use dtn_core::Corpus;
use nalgebra::DMatrix;

use crate::error::{DiagnosticsError, Result};

/// `KL(p || q) + KL(q || p)` for strictly positive vectors, normalised
/// first.
pub fn symmetric_kl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(DiagnosticsError::LengthMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Err(DiagnosticsError::Empty("distribution"));
    }
    if p.iter().chain(q).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(DiagnosticsError::Degenerate(
            "divergence needs strictly positive entries; increase the smoothing".into(),
        ));
    }
    let sp: f64 = p.iter().sum();
    let sq: f64 = q.iter().sum();
    Ok(p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            let (a, b) = (a / sp, b / sq);
            (a - b) * (a / b).ln()
        })
        .sum())
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Criterion for a topic-token count matrix whose cells already include
/// any smoothing.
pub fn arun_divergence(topic_word: &[Vec<f64>]) -> Result<f64> {
    let k = topic_word.len();
    if k < 2 {
        return Err(DiagnosticsError::Degenerate("need at least two topics".into()));
    }
    let w = topic_word[0].len();
    if w < k {
        return Err(DiagnosticsError::Degenerate(format!(
            "{k} topics exceed the {w}-token vocabulary; the matrix is rank deficient"
        )));
    }
    let mass: Vec<f64> = topic_word.iter().map(|row| row.iter().sum()).collect();
    if mass.iter().any(|&m| !(m > 0.0)) {
        return Err(DiagnosticsError::Degenerate(
            "a topic has no mass; use positive smoothing".into(),
        ));
    }
    let gram = DMatrix::from_fn(k, k, |a, b| {
        let dot: f64 = topic_word[a].iter().zip(&topic_word[b]).map(|(x, y)| x * y).sum();
        dot / (mass[a] * mass[b])
    });
    let singular: Vec<f64> = gram
        .symmetric_eigenvalues()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    symmetric_kl(&sorted_desc(singular), &sorted_desc(mass))
}

/// Smoothed topic-token counts of an assignment.
pub fn topic_word_counts(corpus: &Corpus, z: &[usize], n_topics: usize, beta: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![beta; corpus.vocabulary().len()]; n_topics];
    for (post, &k) in corpus.posts().iter().zip(z) {
        for &(w, c) in &post.tokens {
            m[k][w as usize] += c as f64;
        }
    }
    m
}

pub fn arun_criterion(corpus: &Corpus, z: &[usize], n_topics: usize, beta: f64) -> Result<f64> {
    if z.len() != corpus.posts().len() {
        return Err(DiagnosticsError::LengthMismatch(z.len(), corpus.posts().len()));
    }
    arun_divergence(&topic_word_counts(corpus, z, n_topics, beta))
}

/// Index of the smallest criterion value; ties go to the smaller `K`.
pub fn argmin(values: &[(usize, f64)]) -> Option<usize> {
    values
        .iter()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|&(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_identity_and_symmetry() {
        let p = [0.2, 0.3, 0.5];
        let q = [0.5, 0.25, 0.25];
        assert_eq!(symmetric_kl(&p, &p).unwrap(), 0.0);
        let a = symmetric_kl(&p, &q).unwrap();
        let b = symmetric_kl(&q, &p).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(a > 0.0);
        assert!(symmetric_kl(&[0.0, 1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn disjoint_rows_of_equal_mass_and_spread_give_zero() {
        let m = vec![vec![3.0, 3.0, 0.0, 0.0], vec![0.0, 0.0, 3.0, 3.0]];
        assert!(arun_divergence(&m).unwrap() < 1e-12);
    }

    #[test]
    fn disjoint_rows_match_hand_computation() {
        // orthogonal rows: singular values are the row distributions' norms
        let m = vec![vec![6.0, 2.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]];
        let n0 = (0.75f64.powi(2) + 0.25f64.powi(2)).sqrt();
        let n1 = 0.5f64.sqrt();
        // both vectors sorted descending: n0 > n1 and 0.8 > 0.2
        let (s0, s1) = (n0 / (n0 + n1), n1 / (n0 + n1));
        let (m0, m1) = (0.8, 0.2);
        let expected = (s0 - m0) * (s0 / m0).ln() + (s1 - m1) * (s1 / m1).ln();
        let got = arun_divergence(&m).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn split_topic_is_penalised() {
        let true_k = vec![vec![4.0, 4.0, 1e-3, 1e-3], vec![1e-3, 1e-3, 4.0, 4.0]];
        let split = vec![
            vec![2.0, 2.0, 1e-3, 1e-3],
            vec![2.0, 2.0, 1e-3, 1e-3],
            vec![1e-3, 1e-3, 4.0, 4.0],
        ];
        assert!(arun_divergence(&split).unwrap() > arun_divergence(&true_k).unwrap());
    }

    #[test]
    fn argmin_prefers_smaller_k_on_ties() {
        assert_eq!(argmin(&[(3, 0.5), (2, 0.5), (4, 0.7)]), Some(2));
        assert_eq!(argmin(&[]), None);
    }
}
