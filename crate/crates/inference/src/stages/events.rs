use dtn_core::math::{ln_normal_kernel, sample_positive_normal, truncated_walk_log_correction};
use dtn_core::Rng;

use super::{accept, Stage, StageStats, StepAdapter, Sweep};
use crate::state::{Model, SamplerState};

/// `sum_i D_kit ln(pi_ik + e * psi)` for one topic and day.
fn day_term(model: &Model, state: &SamplerState, k: usize, t: u32, psi: f64, event: bool) -> f64 {
    let extra = if event { psi } else { 0.0 };
    let mut acc = 0.0;
    for i in 0..model.n_blogs() {
        let c = state.d(model, i, t, k);
        if c > 0 {
            acc += c as f64 * (state.pi[i][k] + extra).ln();
        }
    }
    acc
}

/// Log acceptance ratio for flipping the event indicator of topic `k` on
/// day `t`. `total_rate` is `sum_i rho_i`.
pub fn event_log_ratio(model: &Model, state: &SamplerState, k: usize, t: u32, total_rate: f64) -> f64 {
    let psi = state.psi[k];
    let current = state.events[k][t as usize - 1];
    let sign = if current { -1.0 } else { 1.0 };
    let prior = model.cfg.event_prior.ln() - (1.0 - model.cfg.event_prior).ln();
    day_term(model, state, k, t, psi, !current) - day_term(model, state, k, t, psi, current)
        - sign * psi * total_rate
        + sign * prior
}

/// Flip proposals on every event indicator.
pub struct EventStage;

impl Stage for EventStage {
    fn name(&self) -> &'static str {
        "events"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, _sweep: Sweep) -> StageStats {
        let mut stats = StageStats::default();
        let total_rate = state.total_rate();
        for k in 0..model.n_topics() {
            for t in 1..=model.horizon() {
                let ok = accept(event_log_ratio(model, state, k, t, total_rate), rng);
                if ok {
                    let e = &mut state.events[k][t as usize - 1];
                    *e = !*e;
                }
                stats.record(ok);
            }
        }
        stats
    }
}

fn psi_loglik(model: &Model, state: &SamplerState, k: usize, psi: f64, total_rate: f64) -> f64 {
    let mut acc = 0.0;
    for t in 1..=model.horizon() {
        if state.events[k][t as usize - 1] {
            acc += day_term(model, state, k, t, psi, true) - psi * total_rate;
        }
    }
    acc
}

/// Log acceptance ratio for moving topic `k`'s event boost to `proposal`
/// under a walk with standard deviation `step`.
pub fn psi_log_ratio(model: &Model, state: &SamplerState, k: usize, proposal: f64, step: f64, total_rate: f64) -> f64 {
    let cfg = model.cfg;
    let psi = state.psi[k];
    psi_loglik(model, state, k, proposal, total_rate) - psi_loglik(model, state, k, psi, total_rate)
        + ln_normal_kernel(proposal, cfg.psi_prior_mean, cfg.psi_prior_sd)
        - ln_normal_kernel(psi, cfg.psi_prior_mean, cfg.psi_prior_sd)
        + truncated_walk_log_correction(psi, proposal, step)
}

/// Truncated-normal random walk on each topic's event boost.
#[derive(Default)]
pub struct PsiStage {
    steps: Option<StepAdapter>,
}

impl Stage for PsiStage {
    fn name(&self) -> &'static str {
        "psi"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, sweep: Sweep) -> StageStats {
        let mut stats = StageStats::default();
        let steps = self
            .steps
            .get_or_insert_with(|| StepAdapter::new(vec![model.cfg.psi_step; model.n_topics()]));
        let total_rate = state.total_rate();
        for k in 0..model.n_topics() {
            let step = steps.step(k);
            let proposal = sample_positive_normal(state.psi[k], step, rng);
            let ok = accept(psi_log_ratio(model, state, k, proposal, step, total_rate), rng);
            if ok {
                state.psi[k] = proposal;
            }
            steps.record(k, ok, sweep);
            stats.record(ok);
        }
        stats
    }
}
