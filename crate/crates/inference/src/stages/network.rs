use dtn_core::math::{ln_normal_kernel, softplus};
use dtn_core::Rng;
use dtn_genmodel::block_similarity;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{accept, Stage, StageStats, StepAdapter, Sweep};
use crate::state::{Model, SamplerState};

/// `B(i, j)` for every ordered pair, row-major.
pub fn similarity_matrix(b: &[usize], pi: &[Vec<f64>]) -> Vec<f64> {
    let n = b.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i * n + j] = block_similarity(b[i], b[j], &pi[i], &pi[j]);
            }
        }
    }
    out
}

/// Bernoulli log-likelihood of one ordered pair on one day.
#[inline]
pub(crate) fn link_term(model: &Model, theta: &[f64; 5], i: usize, j: usize, t: u32, similarity: f64) -> f64 {
    let cov = &model.covariates;
    let eta = theta[0]
        + theta[1] * similarity
        + if cov.lag(i, j, t) { theta[2] } else { 0.0 }
        + theta[3] * cov.indegree(j, t)
        + theta[4] * cov.outdegree(i, t);
    let linked = model.adjacency.get(i, j, t);
    if linked {
        eta - softplus(eta)
    } else {
        -softplus(eta)
    }
}

/// Link covariates with block similarity fixed, ready for repeated
/// likelihood evaluation at different coefficients.
pub struct LinkDesign<'a, 'm> {
    model: &'a Model<'m>,
    similarity: Vec<f64>,
    /// `sum S` over observed links; the linear part of the likelihood.
    linked: [f64; 5],
}

impl<'a, 'm> LinkDesign<'a, 'm> {
    pub fn new(model: &'a Model<'m>, b: &[usize], pi: &[Vec<f64>]) -> Self {
        let similarity = similarity_matrix(b, pi);
        let n = model.n_blogs();
        let cov = &model.covariates;
        let mut linked = [0.0; 5];
        for (t, i, j) in model.adjacency.edges() {
            let s = cov.covariates(i, j, t, similarity[i * n + j]);
            for (acc, x) in linked.iter_mut().zip(s) {
                *acc += x;
            }
        }
        LinkDesign {
            model,
            similarity,
            linked,
        }
    }

    /// Log-likelihood of the whole adjacency tensor. Days are summed in
    /// order so the result does not depend on the thread count.
    pub fn loglik(&self, theta: &[f64; 5]) -> f64 {
        let model = self.model;
        let n = model.n_blogs();
        let cov = &model.covariates;
        let per_day: Vec<f64> = (1..=model.horizon())
            .into_par_iter()
            .map(|t| {
                let col: Vec<f64> = (0..n).map(|j| theta[3] * cov.indegree(j, t)).collect();
                let bits = cov.lag_bits();
                let mut acc = 0.0;
                for i in 0..n {
                    let row = theta[0] + theta[4] * cov.outdegree(i, t);
                    let sim = &self.similarity[i * n..(i + 1) * n];
                    let offset = cov.lag_offset(i, t);
                    for j in 0..n {
                        let bit = offset + j;
                        let lag = (bits[bit >> 6] >> (bit & 63) & 1) as f64;
                        acc += softplus(row + theta[1] * sim[j] + col[j] + theta[2] * lag);
                    }
                    // the loop above included the self pair
                    acc -= softplus(row + theta[1] * sim[i] + col[i]);
                }
                acc
            })
            .collect();
        let linear: f64 = theta.iter().zip(&self.linked).map(|(a, b)| a * b).sum();
        linear - per_day.iter().sum::<f64>()
    }
}

/// Log-likelihood of the whole adjacency tensor at the given block
/// similarities.
pub fn network_loglik(model: &Model, b: &[usize], pi: &[Vec<f64>], theta: &[f64; 5]) -> f64 {
    LinkDesign::new(model, b, pi).loglik(theta)
}

/// Log acceptance ratio for moving the coefficients from `theta` (with
/// likelihood `current`) to `proposal`; also returns the proposal's
/// likelihood.
pub fn theta_log_ratio(
    model: &Model,
    design: &LinkDesign,
    current: f64,
    theta: &[f64; 5],
    proposal: &[f64; 5],
) -> (f64, f64) {
    let cfg = model.cfg;
    let ll = design.loglik(proposal);
    let mut ratio = ll - current;
    for c in 0..5 {
        ratio += ln_normal_kernel(proposal[c], cfg.theta_prior_mean, cfg.theta_prior_sd)
            - ln_normal_kernel(theta[c], cfg.theta_prior_mean, cfg.theta_prior_sd);
    }
    (ratio, ll)
}

/// Component-wise Gaussian random walk on the link coefficients, repeated
/// `network_updates` times.
#[derive(Default)]
pub struct ThetaStage {
    steps: Option<StepAdapter>,
}

impl Stage for ThetaStage {
    fn name(&self) -> &'static str {
        "theta"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, sweep: Sweep) -> StageStats {
        let mut stats = StageStats::default();
        let steps = self
            .steps
            .get_or_insert_with(|| StepAdapter::new(model.cfg.theta_step));
        let design = LinkDesign::new(model, &state.b, &state.pi);
        let mut current = design.loglik(&state.theta);
        for _ in 0..model.cfg.network_updates {
            for c in 0..5 {
                let z: f64 = StandardNormal.sample(rng);
                let mut proposal = state.theta;
                proposal[c] += steps.step(c) * z;
                let (ratio, ll) = theta_log_ratio(model, &design, current, &state.theta, &proposal);
                let ok = accept(ratio, rng);
                if ok {
                    state.theta = proposal;
                    current = ll;
                }
                steps.record(c, ok, sweep);
                stats.record(ok);
            }
        }
        stats
    }
}
