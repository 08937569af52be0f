//! Gibbs stages as named, swappable kernels.
//!
//! Each iteration runs the stages listed in the configuration (`stages=`)
//! in order. A stage may update any part of the state but must leave the
//! count tables consistent with `z`.

mod blocks;
mod events;
mod interests;
mod network;
mod topics;

pub use blocks::{block_conditional, block_log_weights, pair_tables, BlockStage, PairTables};
pub use events::{event_log_ratio, psi_log_ratio, EventStage, PsiStage};
pub use interests::{pi_log_ratio, rho_log_ratio, PiStage, RhoStage};
pub use network::{network_loglik, similarity_matrix, theta_log_ratio, LinkDesign, ThetaStage};
pub use topics::TopicStage;

use dtn_core::Rng;

use crate::state::{Model, SamplerState};

/// Proposal bookkeeping for one stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl StageStats {
    pub fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
    }

    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }

    pub fn merge(&mut self, other: StageStats) {
        self.proposed += other.proposed;
        self.accepted += other.accepted;
    }
}

/// Where the sampler is in its schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub iteration: usize,
    /// Step sizes may be tuned during this sweep.
    pub adapting: bool,
}

impl Sweep {
    pub fn new(iteration: usize) -> Self {
        Sweep {
            iteration,
            adapting: false,
        }
    }
}

pub trait Stage: Send {
    fn name(&self) -> &'static str;

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, sweep: Sweep) -> StageStats;
}

/// Per-parameter random-walk step sizes, nudged towards a target
/// acceptance rate while adapting and fixed otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct StepAdapter {
    log_steps: Vec<f64>,
    updates: Vec<u64>,
}

const TARGET_ACCEPTANCE: f64 = 0.44;

impl StepAdapter {
    pub fn new(steps: impl IntoIterator<Item = f64>) -> Self {
        let log_steps: Vec<f64> = steps.into_iter().map(f64::ln).collect();
        let updates = vec![0; log_steps.len()];
        StepAdapter { log_steps, updates }
    }

    pub fn step(&self, p: usize) -> f64 {
        self.log_steps[p].exp()
    }

    pub fn record(&mut self, p: usize, accepted: bool, sweep: Sweep) {
        if !sweep.adapting {
            return;
        }
        self.updates[p] += 1;
        let gain = 1.0 / (self.updates[p] as f64).sqrt();
        let hit = if accepted { 1.0 } else { 0.0 };
        self.log_steps[p] += gain * (hit - TARGET_ACCEPTANCE);
    }
}

type StageCtor = fn() -> Box<dyn Stage>;

/// Stages available to `stages=`, by name.
pub const STAGES: &[(&str, StageCtor)] = &[
    ("topics", || Box::new(TopicStage)),
    ("pi", || Box::new(PiStage)),
    ("rho", || Box::<RhoStage>::default()),
    ("events", || Box::new(EventStage)),
    ("psi", || Box::<PsiStage>::default()),
    ("theta", || Box::<ThetaStage>::default()),
    ("blocks", || Box::new(BlockStage)),
];

pub fn stage(name: &str) -> Option<Box<dyn Stage>> {
    STAGES.iter().find(|(n, _)| *n == name).map(|(_, ctor)| ctor())
}

/// Builds the configured pipeline; unknown names are reported together.
pub fn pipeline(names: &[String]) -> Result<Vec<Box<dyn Stage>>, Vec<String>> {
    let mut out = Vec::new();
    let mut unknown = Vec::new();
    for name in names {
        match stage(name) {
            Some(s) => out.push(s),
            None => unknown.push(format!(
                "unknown stage {name:?} (known: {})",
                STAGES.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            )),
        }
    }
    if unknown.is_empty() {
        Ok(out)
    } else {
        Err(unknown)
    }
}

/// Metropolis-Hastings acceptance for a log acceptance ratio.
pub(crate) fn accept(log_ratio: f64, rng: &mut Rng) -> bool {
    use rand::Rng as _;
    if log_ratio.is_nan() {
        return false;
    }
    log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
}
