//! Topic-interest blocks: the catalog of admissible interest sets and the
//! membership priors used when simulating.

use dtn_core::math::choose;

/// Ordered catalog of blocks. Block `b` is interested in `topics(b)`.
///
/// Order: every singleton, every pair (lexicographic), every triple
/// (lexicographic), then the block interested in all topics. For `K <= 3`
/// the all-topics block coincides with the largest subset and is not
/// repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCatalog {
    n_topics: usize,
    blocks: Vec<Vec<usize>>,
    all_topics: usize,
}

/// Builds the block catalog for `n_topics` topics.
pub fn block_index(n_topics: usize) -> BlockCatalog {
    assert!(n_topics >= 1, "need at least one topic");
    let k = n_topics;
    let mut blocks = Vec::with_capacity(k + choose(k, 2) + choose(k, 3) + 1);
    for a in 0..k {
        blocks.push(vec![a]);
    }
    for a in 0..k {
        for b in a + 1..k {
            blocks.push(vec![a, b]);
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                blocks.push(vec![a, b, c]);
            }
        }
    }
    let all_topics = if k <= 3 {
        blocks.len() - 1
    } else {
        blocks.push((0..k).collect());
        blocks.len() - 1
    };
    BlockCatalog {
        n_topics,
        blocks,
        all_topics,
    }
}

impl BlockCatalog {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    /// Topics of interest to block `b`, ascending.
    pub fn topics(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// Entry `I[k, b]` of the interest matrix.
    pub fn interested(&self, b: usize, k: usize) -> bool {
        self.blocks[b].binary_search(&k).is_ok()
    }

    /// Index of the block interested in every topic.
    pub fn all_topics(&self) -> usize {
        self.all_topics
    }

    /// Dense `K x B` interest matrix, row-major.
    pub fn interest_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n_topics)
            .map(|k| (0..self.len()).map(|b| self.interested(b, k) as u8).collect())
            .collect()
    }

    /// Dirichlet parameters for a blog in block `b`: `P` on the block's
    /// topics, 1 elsewhere.
    pub fn interest_prior(&self, b: usize, concentration: f64) -> Vec<f64> {
        let mut alpha = vec![1.0; self.n_topics];
        for &k in self.topics(b) {
            alpha[k] = concentration;
        }
        alpha
    }

    /// Size category of a block: 1, 2, 3, or `None` for the all-topics block.
    pub fn category(&self, b: usize) -> Option<usize> {
        if b == self.all_topics {
            None
        } else {
            Some(self.blocks[b].len())
        }
    }
}

/// A scheme for the block membership probabilities `p_B`.
pub trait BlockPrior: Send + Sync {
    fn name(&self) -> &'static str;
    fn probabilities(&self, catalog: &BlockCatalog) -> Vec<f64>;
}

/// Every block equally likely.
pub struct UniformBlocks;

impl BlockPrior for UniformBlocks {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn probabilities(&self, catalog: &BlockCatalog) -> Vec<f64> {
        vec![1.0 / catalog.len() as f64; catalog.len()]
    }
}

/// Equal mass to the singleton, pair, triple and all-topics categories,
/// split evenly within each.
pub struct CategoryBlocks;

impl BlockPrior for CategoryBlocks {
    fn name(&self) -> &'static str {
        "category"
    }

    fn probabilities(&self, catalog: &BlockCatalog) -> Vec<f64> {
        // slot 0 holds the all-topics block
        let mut sizes = [0usize; 4];
        for b in 0..catalog.len() {
            sizes[catalog.category(b).unwrap_or(0)] += 1;
        }
        let n_categories = sizes.iter().filter(|&&s| s > 0).count() as f64;
        (0..catalog.len())
            .map(|b| 1.0 / n_categories / sizes[catalog.category(b).unwrap_or(0)] as f64)
            .collect()
    }
}

type BlockPriorCtor = fn() -> Box<dyn BlockPrior>;

/// Registered membership schemes, selectable by name (`p_B=`).
pub const BLOCK_PRIORS: &[(&str, BlockPriorCtor)] = &[
    ("uniform", || Box::new(UniformBlocks)),
    ("category", || Box::new(CategoryBlocks)),
];

pub fn block_prior(name: &str) -> Option<Box<dyn BlockPrior>> {
    BLOCK_PRIORS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, ctor)| ctor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn binomial_oracle(k: usize) -> usize {
        // count subsets of size 1..=3 by enumeration over bitmasks
        let n = (0u32..(1 << k)).filter(|m| (1..=3).contains(&m.count_ones())).count();
        if k > 3 {
            n + 1
        } else {
            n
        }
    }

    #[test]
    fn catalog_sizes() {
        assert_eq!(block_index(22).len(), 1794);
        assert_eq!(block_index(4).len(), 15);
        assert_eq!(block_index(1).len(), 1);
        for k in 1..=12 {
            assert_eq!(block_index(k).len(), binomial_oracle(k), "K={k}");
        }
    }

    #[test]
    fn columns_distinct_and_sums_admissible() {
        for k in 1..=9 {
            let cat = block_index(k);
            let m = cat.interest_matrix();
            let mut seen = HashSet::new();
            for b in 0..cat.len() {
                let col: Vec<u8> = (0..k).map(|r| m[r][b]).collect();
                let sum: usize = col.iter().map(|&x| x as usize).sum();
                assert!([1, 2, 3, k].contains(&sum));
                assert!(seen.insert(col));
            }
            assert_eq!(cat.topics(cat.all_topics()).len(), k);
        }
    }

    #[test]
    fn order_is_singletons_pairs_triples_all() {
        let cat = block_index(4);
        assert_eq!(cat.topics(0), &[0]);
        assert_eq!(cat.topics(4), &[0, 1]);
        assert_eq!(cat.topics(9), &[2, 3]);
        assert_eq!(cat.topics(10), &[0, 1, 2]);
        assert_eq!(cat.topics(14), &[0, 1, 2, 3]);
        assert_eq!(cat.all_topics(), 14);
    }

    #[test]
    fn priors_sum_to_one() {
        for (name, _) in BLOCK_PRIORS {
            for k in 1..=6 {
                let cat = block_index(k);
                let p = block_prior(name).unwrap().probabilities(&cat);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        let p = CategoryBlocks.probabilities(&block_index(4));
        assert!((p[14] - 0.25).abs() < 1e-15);
        assert!((p[0] - 0.0625).abs() < 1e-15);
        assert!(block_prior("nope").is_none());
    }

    #[test]
    fn interest_prior_marks_block_topics() {
        let cat = block_index(4);
        assert_eq!(cat.interest_prior(4, 50.0), vec![50.0, 50.0, 1.0, 1.0]);
    }
}
