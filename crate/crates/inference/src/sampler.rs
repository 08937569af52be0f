use std::collections::BTreeMap;
use std::time::Instant;

use dtn_core::{AdjacencyTensor, Corpus, ModelConfig, PosteriorDraws, Rng};
use serde::Serialize;

use crate::stages::{network_loglik, pipeline, StageStats, Sweep};
use crate::state::{Model, SamplerState};

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("count audit failed after stage {stage:?} of iteration {iteration}: {message}")]
    Audit {
        iteration: usize,
        stage: String,
        message: String,
    },
}

/// Per-iteration diagnostics. Contains nothing time-dependent so that
/// identical seeds give identical traces.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub post_loglik: f64,
    pub network_loglik: f64,
    pub occupied_blocks: usize,
    pub events: usize,
    pub theta: [f64; 5],
    pub acceptance: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Recount every table after each stage rather than once per iteration.
    pub audit_each_stage: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub draws: PosteriorDraws,
    pub trace: Vec<IterationRecord>,
    pub acceptance: BTreeMap<String, StageStats>,
    /// Wall-clock seconds spent in each stage.
    pub stage_seconds: BTreeMap<String, f64>,
    pub final_state: SamplerState,
}

/// Runs the full sampler from a fresh initialisation.
pub fn run_sampler(
    corpus: &Corpus,
    adjacency: &AdjacencyTensor,
    cfg: &ModelConfig,
    rng: &mut Rng,
    opts: RunOptions,
) -> Result<RunOutput, InferenceError> {
    cfg.validate().map_err(InferenceError::Config)?;
    let mut stages = pipeline(&cfg.stages).map_err(InferenceError::Config)?;
    let model = Model::new(corpus, adjacency, cfg);
    let mut state = SamplerState::initialise(&model, rng);
    let mut draws = PosteriorDraws::new(cfg.topics);
    let mut trace = Vec::with_capacity(cfg.iters);
    let mut totals: BTreeMap<String, StageStats> = BTreeMap::new();
    let mut stage_seconds: BTreeMap<String, f64> = BTreeMap::new();
    for it in 0..cfg.iters {
        let mut acceptance = BTreeMap::new();
        for stage in stages.iter_mut() {
            let started = Instant::now();
            let sweep = Sweep {
                iteration: it,
                adapting: cfg.adapt && it < cfg.burn_in,
            };
            let stats = stage.run(&model, &mut state, rng, sweep);
            *stage_seconds.entry(stage.name().to_string()).or_default() += started.elapsed().as_secs_f64();
            if let Some(r) = stats.rate() {
                acceptance.insert(stage.name().to_string(), r);
            }
            totals.entry(stage.name().to_string()).or_default().merge(stats);
            if opts.audit_each_stage {
                audit(&model, &state, it, stage.name())?;
            }
        }
        if !opts.audit_each_stage {
            audit(&model, &state, it, "end of iteration")?;
        }
        trace.push(IterationRecord {
            iteration: it,
            post_loglik: state.post_count_loglik(&model),
            network_loglik: network_loglik(&model, &state.b, &state.pi, &state.theta),
            occupied_blocks: state.block_sizes.iter().filter(|&&s| s > 0).count(),
            events: state.events.iter().flatten().filter(|&&e| e).count(),
            theta: state.theta,
            acceptance,
        });
        if cfg.keeps(it) {
            draws.snapshots.push(state.snapshot(it));
        }
        log::debug!("iteration {it} done");
    }
    Ok(RunOutput {
        draws,
        trace,
        acceptance: totals,
        stage_seconds,
        final_state: state,
    })
}

fn audit(model: &Model, state: &SamplerState, iteration: usize, stage: &str) -> Result<(), InferenceError> {
    state.audit(model).map_err(|message| InferenceError::Audit {
        iteration,
        stage: stage.to_string(),
        message,
    })
}
