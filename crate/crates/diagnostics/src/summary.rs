use std::collections::BTreeMap;

use dtn_core::PosteriorDraws;
use serde::Serialize;

use crate::ari::ari_series;
use crate::error::{DiagnosticsError, Result};

/// Posterior mean, standard deviation and central 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Summary of a sample. The interval uses the order statistics at
/// `floor(0.025 (n - 1))` and `ceil(0.975 (n - 1))`, so it always brackets
/// at least 95% of the draws.
pub fn summarize_values(xs: &[f64]) -> Option<Summary> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let last = (xs.len() - 1) as f64;
    let lo = sorted[(0.025 * last).floor() as usize];
    let hi = sorted[(0.975 * last).ceil() as usize];
    Some(Summary { mean, sd, lo, hi })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSummary {
    pub parameter: String,
    pub index: String,
    #[serde(flatten)]
    pub summary: Summary,
}

fn row(parameter: &str, index: String, xs: &[f64]) -> ParameterSummary {
    ParameterSummary {
        parameter: parameter.into(),
        index,
        summary: summarize_values(xs).expect("non-empty draws"),
    }
}

/// Summaries of every continuous parameter: `theta`, `psi`, `rho`, `pi`.
pub fn summarize(draws: &PosteriorDraws) -> Result<Vec<ParameterSummary>> {
    let s = &draws.snapshots;
    if s.is_empty() {
        return Err(DiagnosticsError::Empty("posterior draws"));
    }
    let mut out = Vec::new();
    for c in 0..5 {
        let xs: Vec<f64> = s.iter().map(|d| d.theta[c]).collect();
        out.push(row("theta", c.to_string(), &xs));
    }
    for k in 0..s[0].psi.len() {
        let xs: Vec<f64> = s.iter().map(|d| d.psi[k]).collect();
        out.push(row("psi", k.to_string(), &xs));
    }
    for i in 0..s[0].rho.len() {
        let xs: Vec<f64> = s.iter().map(|d| d.rho[i]).collect();
        out.push(row("rho", i.to_string(), &xs));
    }
    for i in 0..s[0].pi.len() {
        for k in 0..s[0].pi[i].len() {
            let xs: Vec<f64> = s.iter().map(|d| d.pi[i][k]).collect();
            out.push(row("pi", format!("{i}:{k}"), &xs));
        }
    }
    Ok(out)
}

/// Most frequent label in each column; ties go to the lowest label.
fn modal<'a>(rows: impl Iterator<Item = &'a Vec<usize>>, len: usize) -> Vec<usize> {
    let mut counts: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); len];
    for r in rows {
        for (c, &v) in counts.iter_mut().zip(r) {
            *c.entry(v).or_default() += 1;
        }
    }
    counts
        .iter()
        .map(|c| {
            let mut best = (0usize, 0u32);
            for (&label, &n) in c {
                if n > best.1 {
                    best = (label, n);
                }
            }
            best.0
        })
        .collect()
}

/// Modal topic of every post and modal block of every blog.
pub fn map_assignments(draws: &PosteriorDraws) -> Result<(Vec<usize>, Vec<usize>)> {
    let s = &draws.snapshots;
    if s.is_empty() {
        return Err(DiagnosticsError::Empty("posterior draws"));
    }
    let z = modal(s.iter().map(|d| &d.z), s[0].z.len());
    let b = modal(s.iter().map(|d| &d.b), s[0].b.len());
    Ok((z, b))
}

/// ARI between consecutive retained draws, for topics and for blocks.
pub fn mixing_series(draws: &PosteriorDraws) -> Result<(Vec<f64>, Vec<f64>)> {
    let z: Vec<Vec<usize>> = draws.snapshots.iter().map(|d| d.z.clone()).collect();
    let b: Vec<Vec<usize>> = draws.snapshots.iter().map(|d| d.b.clone()).collect();
    Ok((ari_series(&z)?, ari_series(&b)?))
}
