use dtn_core::math::{ln_gamma, ln_poisson_pmf, normalize_log_weights, sample_categorical};
use dtn_core::Rng;
use rayon::prelude::*;

use super::network::link_term;
use super::{Stage, StageStats, Sweep};
use crate::state::{Model, SamplerState};

/// Network log-likelihood of each unordered pair, both directions summed
/// over all days, under shared and under distinct block membership.
#[derive(Debug, Clone)]
pub struct PairTables {
    n: usize,
    same: Vec<f64>,
    diff: Vec<f64>,
}

impl PairTables {
    pub fn same(&self, i: usize, j: usize) -> f64 {
        self.same[i * self.n + j]
    }

    pub fn diff(&self, i: usize, j: usize) -> f64 {
        self.diff[i * self.n + j]
    }
}

pub fn pair_tables(model: &Model, pi: &[Vec<f64>], theta: &[f64; 5]) -> PairTables {
    let n = model.n_blogs();
    let horizon = model.horizon();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut same = vec![0.0; n];
            let mut diff = vec![0.0; n];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let sim: f64 = pi[i].iter().zip(&pi[j]).map(|(a, b)| a * b).sum();
                for t in 1..=horizon {
                    same[j] += link_term(model, theta, i, j, t, 1.0) + link_term(model, theta, j, i, t, 1.0);
                    diff[j] += link_term(model, theta, i, j, t, sim) + link_term(model, theta, j, i, t, sim);
                }
            }
            (same, diff)
        })
        .collect();
    let mut same = Vec::with_capacity(n * n);
    let mut diff = Vec::with_capacity(n * n);
    for (s, d) in rows {
        same.extend(s);
        diff.extend(d);
    }
    PairTables { n, same, diff }
}

/// `ln Dir(pi; alpha_b)` where `alpha_b` puts `p` on the block's topics and 1
/// elsewhere.
fn ln_interest_prior(pi: &[f64], topics: &[usize], p: f64) -> f64 {
    let k = pi.len() as f64;
    let m = topics.len() as f64;
    let mut acc = ln_gamma(p * m + (k - m)) - m * ln_gamma(p);
    for &t in topics {
        acc += (p - 1.0) * pi[t].ln();
    }
    acc
}

/// Log full-conditional weights of blog `i` over `candidates`. Blog `i`'s
/// own membership is excluded from the block sizes.
pub fn block_log_weights(
    model: &Model,
    state: &SamplerState,
    tables: &PairTables,
    i: usize,
    candidates: &[usize],
) -> Vec<f64> {
    let cfg = model.cfg;
    let n = model.n_blogs();
    let alpha_b = cfg.block_concentration;
    let own = state.b[i];
    let size_without = |b: usize| state.block_sizes[b] - (b == own) as u32;
    let others_nonempty = state
        .block_sizes
        .iter()
        .enumerate()
        .filter(|&(b, _)| size_without(b) > 0)
        .count() as f64;
    let mut base = 0.0;
    let mut delta = vec![0.0; model.catalog.len()];
    for j in 0..n {
        if j != i {
            base += tables.diff(i, j);
            delta[state.b[j]] += tables.same(i, j) - tables.diff(i, j);
        }
    }
    candidates
        .iter()
        .map(|&b| {
            let size = size_without(b) as f64;
            let occupied = others_nonempty + if size == 0.0 { 1.0 } else { 0.0 };
            (size + alpha_b).ln() - (alpha_b * occupied + n as f64 - 1.0).ln()
                + base
                + delta[b]
                + ln_interest_prior(&state.pi[i], model.catalog.topics(b), cfg.interest_concentration)
                + ln_poisson_pmf(occupied as u64, cfg.block_prior_mean)
        })
        .collect()
}

/// Candidate blocks of blog `i` with their conditional probabilities.
pub fn block_conditional(
    model: &Model,
    state: &SamplerState,
    tables: &PairTables,
    i: usize,
) -> (Vec<usize>, Vec<f64>) {
    let candidates = state.candidate_blocks(model, i);
    let mut w = block_log_weights(model, state, tables, i, &candidates);
    normalize_log_weights(&mut w);
    (candidates, w)
}

/// Gibbs update of block labels, `block_sweeps` passes over the blogs.
pub struct BlockStage;

impl Stage for BlockStage {
    fn name(&self) -> &'static str {
        "blocks"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, _sweep: Sweep) -> StageStats {
        let tables = pair_tables(model, &state.pi, &state.theta);
        for _ in 0..model.cfg.block_sweeps {
            for i in 0..model.n_blogs() {
                let (candidates, probs) = block_conditional(model, state, &tables, i);
                let b = candidates[sample_categorical(&probs, rng)];
                state.block_sizes[state.b[i]] -= 1;
                state.b[i] = b;
                state.block_sizes[b] += 1;
            }
        }
        StageStats::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dtn_core::math::ln_dirichlet_pdf;

    #[test]
    fn interest_prior_matches_dirichlet() {
        let pi = [0.1, 0.5, 0.15, 0.25];
        let alpha = [50.0, 1.0, 50.0, 1.0];
        let a = ln_interest_prior(&pi, &[0, 2], 50.0);
        assert!((a - ln_dirichlet_pdf(&pi, &alpha)).abs() < 1e-9);
    }
}
