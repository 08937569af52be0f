use dtn_core::math::sample_dirichlet;
use rand::Rng;

/// Daily token distributions of every topic.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicChain {
    n_topics: usize,
    vocab_size: usize,
    /// `rows[(t - 1) * K + k]` is `V_kt`.
    rows: Vec<Vec<f64>>,
}

impl TopicChain {
    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn horizon(&self) -> u32 {
        (self.rows.len() / self.n_topics.max(1)) as u32
    }

    /// `V_kt` for 1-based day `t`.
    pub fn row(&self, k: usize, t: u32) -> &[f64] {
        &self.rows[(t as usize - 1) * self.n_topics + k]
    }
}

/// Concentration for topic `k` on day `t`: the mean of the previous
/// `min(ell, t - 1)` days' rows. Day 1 uses `beta` on every token.
pub fn concentration(chain_rows: &[Vec<f64>], n_topics: usize, k: usize, t: u32, ell: u32, beta: f64, vocab_size: usize) -> Vec<f64> {
    if t == 1 {
        return vec![beta; vocab_size];
    }
    let span = ell.min(t - 1);
    let mut a = vec![0.0; vocab_size];
    for back in 1..=span {
        let row = &chain_rows[(t - back - 1) as usize * n_topics + k];
        for (acc, v) in a.iter_mut().zip(row) {
            *acc += v;
        }
    }
    a.iter_mut().for_each(|x| *x /= span as f64);
    a
}

/// Samples the topic chain sequentially in `t`.
pub fn sample_topic_chain<R: Rng + ?Sized>(
    n_topics: usize,
    vocab_size: usize,
    horizon: u32,
    ell: u32,
    beta: f64,
    rng: &mut R,
) -> TopicChain {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_topics * horizon as usize);
    for t in 1..=horizon {
        for k in 0..n_topics {
            let a = concentration(&rows, n_topics, k, t, ell, beta, vocab_size);
            rows.push(sample_dirichlet(&a, rng));
        }
    }
    TopicChain {
        n_topics,
        vocab_size,
        rows,
    }
}

impl TopicChain {
    /// Concentration that generated `V_kt`.
    pub fn concentration(&self, k: usize, t: u32, ell: u32, beta: f64) -> Vec<f64> {
        concentration(&self.rows, self.n_topics, k, t, ell, beta, self.vocab_size)
    }

    /// A chain given explicitly, for tests and hand-built scenarios.
    pub fn from_rows(n_topics: usize, rows: Vec<Vec<f64>>) -> Self {
        let vocab_size = rows.first().map_or(0, Vec::len);
        assert!(rows.len() % n_topics == 0);
        TopicChain {
            n_topics,
            vocab_size,
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dtn_core::seeded_rng;

    #[test]
    fn rows_are_on_the_simplex() {
        let mut rng = seeded_rng(1);
        let chain = sample_topic_chain(3, 40, 30, 5, 0.1, &mut rng);
        for t in 1..=30 {
            for k in 0..3 {
                let row = chain.row(k, t);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn lag_one_uses_previous_row() {
        let mut rng = seeded_rng(2);
        let chain = sample_topic_chain(2, 10, 6, 1, 0.1, &mut rng);
        for t in 2..=6 {
            assert_eq!(chain.concentration(1, t, 1, 0.1), chain.row(1, t - 1));
        }
    }

    #[test]
    fn partial_window_averages_available_days() {
        let mut rng = seeded_rng(3);
        let chain = sample_topic_chain(1, 4, 4, 10, 0.5, &mut rng);
        let a = chain.concentration(0, 3, 10, 0.5);
        for w in 0..4 {
            let mean = (chain.row(0, 1)[w] + chain.row(0, 2)[w]) / 2.0;
            assert!((a[w] - mean).abs() < 1e-15);
        }
        assert_eq!(chain.concentration(0, 1, 10, 0.5), vec![0.5; 4]);
    }

    #[test]
    fn point_mass_persists() {
        // day 1 fixed as a point mass on token 0; later days are sampled
        let mut rows = vec![vec![1.0, 0.0, 0.0]];
        let mut rng = seeded_rng(4);
        for t in 2..=20 {
            let a = concentration(&rows, 1, 0, t, 3, 0.1, 3);
            rows.push(sample_dirichlet(&a, &mut rng));
        }
        for row in &rows {
            assert!(row[0] > 1.0 - 1e-9, "{row:?}");
        }
    }
}
