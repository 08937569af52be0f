use dtn_core::math::{
    ln_dirichlet_pdf, ln_normal_kernel, sample_dirichlet, sample_positive_normal,
    truncated_walk_log_correction,
};
use dtn_core::Rng;

use super::{accept, Stage, StageStats, StepAdapter, Sweep};
use crate::state::{Model, SamplerState};

const PI_FLOOR: f64 = 1e-10;

fn proposal_concentration(pi: &[f64], scale: f64) -> Vec<f64> {
    pi.iter().map(|p| (p * scale).max(PI_FLOOR)).collect()
}

/// Dirichlet proposal centred on the current interests, scaled by the
/// blog's post count. Components are floored so that no topic is ruled out.
fn propose_interests(current: &[f64], scale: f64, rng: &mut Rng) -> Vec<f64> {
    let mut draw = sample_dirichlet(&proposal_concentration(current, scale), rng);
    if draw.iter().any(|&x| x < PI_FLOOR) {
        draw.iter_mut().for_each(|x| *x = x.max(PI_FLOOR));
        let s: f64 = draw.iter().sum();
        draw.iter_mut().for_each(|x| *x /= s);
    }
    draw
}

/// Log acceptance ratio for moving blog `i`'s interests to `proposal`.
pub fn pi_log_ratio(model: &Model, state: &SamplerState, i: usize, proposal: &[f64], event_mass: f64) -> f64 {
    let current = &state.pi[i];
    let prior = model
        .catalog
        .interest_prior(state.b[i], model.cfg.interest_concentration);
    let n_posts = model.blog_posts[i] as f64;
    let rho = state.rho[i];
    state.blog_post_loglik(model, i, proposal, rho, event_mass)
        - state.blog_post_loglik(model, i, current, rho, event_mass)
        + ln_dirichlet_pdf(proposal, &prior)
        - ln_dirichlet_pdf(current, &prior)
        + ln_dirichlet_pdf(current, &proposal_concentration(proposal, n_posts))
        - ln_dirichlet_pdf(proposal, &proposal_concentration(current, n_posts))
}

/// Metropolis-Hastings update of each blog's topic interests.
pub struct PiStage;

impl Stage for PiStage {
    fn name(&self) -> &'static str {
        "pi"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, _sweep: Sweep) -> StageStats {
        let mut stats = StageStats::default();
        let event_mass = state.event_mass();
        for i in 0..model.n_blogs() {
            let n_posts = model.blog_posts[i] as f64;
            if n_posts == 0.0 {
                // the likelihood only sees pi through rho * sum(pi) = rho
                let prior = model
                    .catalog
                    .interest_prior(state.b[i], model.cfg.interest_concentration);
                state.pi[i] = sample_dirichlet(&prior, rng);
                continue;
            }
            let proposal = propose_interests(&state.pi[i], n_posts, rng);
            let ok = accept(pi_log_ratio(model, state, i, &proposal, event_mass), rng);
            if ok {
                state.pi[i] = proposal;
            }
            stats.record(ok);
        }
        stats
    }
}

/// Log acceptance ratio for moving blog `i`'s post rate to `proposal`
/// under a walk with standard deviation `step`.
pub fn rho_log_ratio(model: &Model, state: &SamplerState, i: usize, proposal: f64, step: f64, event_mass: f64) -> f64 {
    let cfg = model.cfg;
    let rho = state.rho[i];
    let n_posts = model.blog_posts[i] as f64;
    let exposure = model.horizon() as f64 * state.pi[i].iter().sum::<f64>() + event_mass;
    let loglik = |r: f64| n_posts * r.ln() - r * exposure;
    loglik(proposal) - loglik(rho)
        + ln_normal_kernel(proposal, cfg.rho_prior_mean, cfg.rho_prior_sd)
        - ln_normal_kernel(rho, cfg.rho_prior_mean, cfg.rho_prior_sd)
        + truncated_walk_log_correction(rho, proposal, step)
}

/// Truncated-normal random walk on each blog's post rate.
#[derive(Default)]
pub struct RhoStage {
    steps: Option<StepAdapter>,
}

impl Stage for RhoStage {
    fn name(&self) -> &'static str {
        "rho"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, sweep: Sweep) -> StageStats {
        let mut stats = StageStats::default();
        let steps = self
            .steps
            .get_or_insert_with(|| StepAdapter::new(vec![model.cfg.rho_step; model.n_blogs()]));
        let event_mass = state.event_mass();
        for i in 0..model.n_blogs() {
            let step = steps.step(i);
            let proposal = sample_positive_normal(state.rho[i], step, rng);
            let ok = accept(rho_log_ratio(model, state, i, proposal, step, event_mass), rng);
            if ok {
                state.rho[i] = proposal;
            }
            steps.record(i, ok, sweep);
            stats.record(ok);
        }
        stats
    }
}
