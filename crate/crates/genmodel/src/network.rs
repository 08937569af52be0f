//! Logistic link model with history-dependent covariates.
//!
//! For sender `i`, receiver `j` and day `t` the covariate vector is
//! `S = (1, B(i,j), L, In_j, Out_i)`:
//!
//! * `B(i,j)`: 1 when both blogs share a block, else `pi_i . pi_j`
//! * `L`: 1 when `j` linked to `i` on any of the previous [`LAG_DAYS`] days
//! * `In_j`: mean daily in-degree of `j` over days `1..t-1` (0 on day 1)
//! * `Out_i`: mean daily out-degree of `i` over days `1..t-1` (0 on day 1)
//!
//! Covariates only look at links strictly before `t`.

use dtn_core::math::logistic;
use dtn_core::AdjacencyTensor;
use rand::Rng;

pub const LAG_DAYS: u32 = 7;
pub const N_COEFFICIENTS: usize = 5;

pub type Coefficients = [f64; N_COEFFICIENTS];
pub type Covariates = [f64; N_COEFFICIENTS];

/// Topic-interest similarity between two blogs.
pub fn block_similarity(block_i: usize, block_j: usize, pi_i: &[f64], pi_j: &[f64]) -> f64 {
    if block_i == block_j {
        1.0
    } else {
        pi_i.iter().zip(pi_j).map(|(a, b)| a * b).sum()
    }
}

pub fn linear_predictor(theta: &Coefficients, s: &Covariates) -> f64 {
    theta.iter().zip(s).map(|(a, b)| a * b).sum()
}

/// `p = exp(theta . S) / (1 + exp(theta . S))`, evaluated without overflow.
pub fn link_probability(theta: &Coefficients, s: &Covariates) -> f64 {
    logistic(linear_predictor(theta, s))
}

pub fn sample_link<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

/// Running link statistics, advanced one day at a time.
#[derive(Debug, Clone)]
pub struct NetworkHistory {
    n: usize,
    day: u32,
    /// last day `sender -> receiver` linked, 0 when never
    last_link: Vec<u32>,
    in_total: Vec<u64>,
    out_total: Vec<u64>,
}

impl NetworkHistory {
    /// Empty history positioned at day 1.
    pub fn new(n: usize) -> Self {
        NetworkHistory {
            n,
            day: 1,
            last_link: vec![0; n * n],
            in_total: vec![0; n],
            out_total: vec![0; n],
        }
    }

    /// Day whose covariates are currently available.
    pub fn day(&self) -> u32 {
        self.day
    }

    pub fn lag(&self, sender: usize, receiver: usize) -> bool {
        let last = self.last_link[receiver * self.n + sender];
        last > 0 && last + LAG_DAYS >= self.day
    }

    pub fn mean_indegree(&self, j: usize) -> f64 {
        if self.day == 1 {
            0.0
        } else {
            self.in_total[j] as f64 / (self.day - 1) as f64
        }
    }

    pub fn mean_outdegree(&self, i: usize) -> f64 {
        if self.day == 1 {
            0.0
        } else {
            self.out_total[i] as f64 / (self.day - 1) as f64
        }
    }

    /// Covariates for `sender -> receiver` on the current day.
    pub fn covariates(&self, sender: usize, receiver: usize, similarity: f64) -> Covariates {
        [
            1.0,
            similarity,
            self.lag(sender, receiver) as u8 as f64,
            self.mean_indegree(receiver),
            self.mean_outdegree(sender),
        ]
    }

    /// Records the current day's links and moves to the next day.
    pub fn advance(&mut self, links: impl IntoIterator<Item = (usize, usize)>) {
        for (i, j) in links {
            self.last_link[i * self.n + j] = self.day;
            self.out_total[i] += 1;
            self.in_total[j] += 1;
        }
        self.day += 1;
    }
}

/// Precomputed history covariates for an observed adjacency tensor: every
/// covariate except block similarity, for every `(i, j, t)`.
#[derive(Debug, Clone)]
pub struct ObservedCovariates {
    n: usize,
    horizon: u32,
    lag: Vec<u64>,
    /// `indegree[(t - 1) * n + j]`
    indegree: Vec<f64>,
    outdegree: Vec<f64>,
}

impl ObservedCovariates {
    pub fn new(adj: &AdjacencyTensor) -> Self {
        let n = adj.n_nodes();
        let horizon = adj.horizon();
        let mut history = NetworkHistory::new(n);
        let cells = n * n * horizon as usize;
        let mut lag = vec![0u64; cells.div_ceil(64)];
        let mut indegree = vec![0.0; n * horizon as usize];
        let mut outdegree = vec![0.0; n * horizon as usize];
        let mut edges = adj.edges().peekable();
        for t in 1..=horizon {
            let base = (t as usize - 1) * n;
            for i in 0..n {
                indegree[base + i] = history.mean_indegree(i);
                outdegree[base + i] = history.mean_outdegree(i);
                for j in 0..n {
                    if i != j && history.lag(i, j) {
                        let s = (base + i) * n + j;
                        lag[s / 64] |= 1 << (s % 64);
                    }
                }
            }
            let mut today = Vec::new();
            while let Some(&(day, i, j)) = edges.peek() {
                if day != t {
                    break;
                }
                today.push((i, j));
                edges.next();
            }
            history.advance(today);
        }
        ObservedCovariates {
            n,
            horizon,
            lag,
            indegree,
            outdegree,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    #[inline]
    pub fn lag(&self, sender: usize, receiver: usize, t: u32) -> bool {
        let s = ((t as usize - 1) * self.n + sender) * self.n + receiver;
        self.lag[s / 64] >> (s % 64) & 1 == 1
    }

    /// Bit offset of `(sender, 0, t)` in [`Self::lag_bits`]; receivers follow
    /// contiguously.
    #[inline]
    pub fn lag_offset(&self, sender: usize, t: u32) -> usize {
        ((t as usize - 1) * self.n + sender) * self.n
    }

    pub fn lag_bits(&self) -> &[u64] {
        &self.lag
    }

    #[inline]
    pub fn indegree(&self, j: usize, t: u32) -> f64 {
        self.indegree[(t as usize - 1) * self.n + j]
    }

    #[inline]
    pub fn outdegree(&self, i: usize, t: u32) -> f64 {
        self.outdegree[(t as usize - 1) * self.n + i]
    }

    pub fn covariates(&self, sender: usize, receiver: usize, t: u32, similarity: f64) -> Covariates {
        [
            1.0,
            similarity,
            self.lag(sender, receiver, t) as u8 as f64,
            self.indegree(receiver, t),
            self.outdegree(sender, t),
        ]
    }
}

/// Simulates daily links given block labels, interests and coefficients.
pub fn sample_network<R: Rng + ?Sized>(
    blocks: &[usize],
    pi: &[Vec<f64>],
    theta: &Coefficients,
    horizon: u32,
    rng: &mut R,
) -> AdjacencyTensor {
    let n = blocks.len();
    let mut adj = AdjacencyTensor::new(n, horizon);
    let mut history = NetworkHistory::new(n);
    let mut similarity = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            similarity[i * n + j] = block_similarity(blocks[i], blocks[j], &pi[i], &pi[j]);
        }
    }
    for t in 1..=horizon {
        let mut today = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let s = history.covariates(i, j, similarity[i * n + j]);
                if sample_link(link_probability(theta, &s), rng) {
                    today.push((i, j));
                    adj.set(i, j, t);
                }
            }
        }
        history.advance(today);
    }
    adj
}
