use dtn_core::Rng;

use super::{Stage, StageStats, Sweep};
use crate::gsdmm::{assign_topic, augmentation_weights};
use crate::state::{Model, SamplerState};

/// Collapsed topic assignment, day by day, `sweeps` passes over each day's
/// posts.
pub struct TopicStage;

impl Stage for TopicStage {
    fn name(&self) -> &'static str {
        "topics"
    }

    fn run(&mut self, model: &Model, state: &mut SamplerState, rng: &mut Rng, _sweep: Sweep) -> StageStats {
        let k_topics = model.n_topics();
        let prior = model.text_prior();
        let mut log_xi: Vec<Option<Vec<f64>>> = vec![None; model.n_blogs()];
        for t in 1..=model.horizon() {
            let day = &model.posts_by_day[t as usize - 1];
            if day.is_empty() {
                continue;
            }
            state.counts.focus(t);
            log_xi.iter_mut().for_each(|x| *x = None);
            for _ in 0..model.cfg.sweeps {
                for &d in day {
                    let post = &model.corpus.posts()[d];
                    let xi = log_xi[post.blog].get_or_insert_with(|| {
                        let rates: Vec<f64> = (0..k_topics)
                            .map(|k| {
                                state.pi[post.blog][k]
                                    + if state.events[k][t as usize - 1] { state.psi[k] } else { 0.0 }
                            })
                            .collect();
                        augmentation_weights(&rates).into_iter().map(f64::ln).collect()
                    });
                    let old = state.z[d];
                    state.counts.remove(post, old);
                    let new = assign_topic(post, &mut state.counts, prior, xi, rng);
                    state.z[d] = new;
                    state.retag_daily(model, d, old, new);
                }
            }
        }
        StageStats::default()
    }
}
