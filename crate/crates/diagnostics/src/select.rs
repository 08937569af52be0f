use dtn_core::{derive_seed, seeded_rng, AdjacencyTensor, Corpus, ModelConfig};
use dtn_inference::{run_sampler, RunOptions};
use serde::Serialize;

use crate::arun::{argmin, arun_criterion};
use crate::error::{DiagnosticsError, Result};
use crate::summary::map_assignments;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionPoint {
    pub topics: usize,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub points: Vec<SelectionPoint>,
    pub best: usize,
}

/// Fits the model once per topic count in `grid` and scores the modal topic
/// assignment of each fit. Each fit gets its own derived seed, so the grid
/// order does not matter.
pub fn select_k(
    corpus: &Corpus,
    adjacency: &AdjacencyTensor,
    base: &ModelConfig,
    grid: &[usize],
    seed: u64,
) -> Result<Selection> {
    if grid.len() < 2 {
        return Err(DiagnosticsError::Degenerate("need at least two topic counts".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &k in grid {
        let mut cfg = base.clone();
        cfg.topics = k;
        let mut rng = seeded_rng(derive_seed(seed, k as u64));
        let out = run_sampler(corpus, adjacency, &cfg, &mut rng, RunOptions::default())?;
        let (z, _) = map_assignments(&out.draws)?;
        points.push(SelectionPoint {
            topics: k,
            criterion: arun_criterion(corpus, &z, k, cfg.beta)?,
        });
    }
    let pairs: Vec<(usize, f64)> = points.iter().map(|p| (p.topics, p.criterion)).collect();
    let best = argmin(&pairs).ok_or_else(|| DiagnosticsError::Degenerate("no finite criterion".into()))?;
    Ok(Selection { points, best })
}
