//! Observed data bundle and the mutable sampler state.

use dtn_core::math::sample_dirichlet;
use dtn_core::{AdjacencyTensor, Corpus, ModelConfig, Rng, Snapshot};
use dtn_genmodel::simulate::sample_gamma;
use dtn_genmodel::{block_index, BlockCatalog, ObservedCovariates};
use rand::Rng as _;

use crate::gsdmm::{assign_topic, TextPrior};
use crate::window::WindowCounts;

/// Everything the sampler reads but never changes.
pub struct Model<'a> {
    pub corpus: &'a Corpus,
    pub adjacency: &'a AdjacencyTensor,
    pub cfg: &'a ModelConfig,
    pub catalog: BlockCatalog,
    pub covariates: ObservedCovariates,
    pub posts_by_day: Vec<Vec<usize>>,
    /// `D_i`: total posts per blog.
    pub blog_posts: Vec<u32>,
}

impl<'a> Model<'a> {
    pub fn new(corpus: &'a Corpus, adjacency: &'a AdjacencyTensor, cfg: &'a ModelConfig) -> Self {
        assert_eq!(corpus.n_blogs(), adjacency.n_nodes(), "blog count mismatch");
        assert_eq!(corpus.horizon(), adjacency.horizon(), "horizon mismatch");
        let mut blog_posts = vec![0u32; corpus.n_blogs()];
        for p in corpus.posts() {
            blog_posts[p.blog] += 1;
        }
        Model {
            corpus,
            adjacency,
            cfg,
            catalog: block_index(cfg.topics),
            covariates: ObservedCovariates::new(adjacency),
            posts_by_day: corpus.posts_by_day(),
            blog_posts,
        }
    }

    pub fn n_topics(&self) -> usize {
        self.cfg.topics
    }

    pub fn n_blogs(&self) -> usize {
        self.corpus.n_blogs()
    }

    pub fn horizon(&self) -> u32 {
        self.corpus.horizon()
    }

    pub fn text_prior(&self) -> TextPrior {
        TextPrior {
            alpha: self.cfg.alpha,
            beta: self.cfg.beta,
        }
    }
}

/// Current values of every latent quantity plus the count tables derived
/// from the topic assignments.
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub z: Vec<usize>,
    pub counts: WindowCounts,
    /// `D_kit` at `[(i * T + t - 1) * K + k]`.
    pub daily: Vec<u32>,
    /// Posts per blog per topic, `[i * K + k]`.
    pub blog_topic: Vec<u32>,
    pub b: Vec<usize>,
    /// Members per block.
    pub block_sizes: Vec<u32>,
    pub pi: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// `events[k][t - 1]`
    pub events: Vec<Vec<bool>>,
    pub psi: Vec<f64>,
    pub theta: [f64; 5],
}

const MIN_RHO: f64 = 1e-3;

impl SamplerState {
    /// Starting point: one sequential pass of topic assignment with a flat
    /// topic prior, block labels drawn uniformly among the blocks that cover
    /// a blog's topics, interests from the block prior updated by the blog's initial topic
    /// counts, rates from the
    /// observed daily means, no events and zero network coefficients.
    pub fn initialise(model: &Model, rng: &mut Rng) -> Self {
        let k_topics = model.n_topics();
        let n = model.n_blogs();
        let horizon = model.horizon();
        let corpus = model.corpus;
        let mut counts = WindowCounts::new(k_topics, corpus.vocabulary().len(), model.cfg.ell, horizon);
        let mut z = vec![0usize; corpus.posts().len()];
        let flat = vec![0.0; k_topics];
        for t in 1..=horizon {
            counts.focus(t);
            for &d in &model.posts_by_day[t as usize - 1] {
                z[d] = assign_topic(&corpus.posts()[d], &mut counts, model.text_prior(), &flat, rng);
            }
        }
        let mut state = SamplerState {
            z,
            counts,
            daily: Vec::new(),
            blog_topic: Vec::new(),
            b: vec![0; n],
            block_sizes: vec![0; model.catalog.len()],
            pi: Vec::with_capacity(n),
            rho: Vec::with_capacity(n),
            events: vec![vec![false; horizon as usize]; k_topics],
            psi: (0..k_topics)
                .map(|_| sample_gamma(model.cfg.psi_shape, model.cfg.psi_rate, rng))
                .collect(),
            theta: [0.0; 5],
        };
        state.rebuild_daily(model);
        for i in 0..n {
            let candidates = state.candidate_blocks(model, i);
            let b = candidates[rng.random_range(0..candidates.len())];
            state.b[i] = b;
            state.block_sizes[b] += 1;
            let mut alpha = model.catalog.interest_prior(b, model.cfg.interest_concentration);
            for (a, &c) in alpha.iter_mut().zip(&state.blog_topic[i * k_topics..(i + 1) * k_topics]) {
                *a += c as f64;
            }
            state.pi.push(sample_dirichlet(&alpha, rng));
            state
                .rho
                .push((model.blog_posts[i] as f64 / horizon as f64).max(MIN_RHO));
        }
        state
    }

    /// Recomputes `D_kit` and the per-blog topic totals from `z`.
    pub fn rebuild_daily(&mut self, model: &Model) {
        let (daily, blog_topic) = daily_tables(model, &self.z);
        self.daily = daily;
        self.blog_topic = blog_topic;
    }

    #[inline]
    pub fn daily_index(model: &Model, i: usize, t: u32, k: usize) -> usize {
        (i * model.horizon() as usize + t as usize - 1) * model.n_topics() + k
    }

    /// `D_kit`
    #[inline]
    pub fn d(&self, model: &Model, i: usize, t: u32, k: usize) -> u32 {
        self.daily[Self::daily_index(model, i, t, k)]
    }

    /// Moves post `d` from its current topic to `k` in the daily tables.
    pub fn retag_daily(&mut self, model: &Model, d: usize, from: usize, to: usize) {
        if from == to {
            return;
        }
        let post = &model.corpus.posts()[d];
        let k_topics = model.n_topics();
        self.daily[Self::daily_index(model, post.blog, post.day, from)] -= 1;
        self.daily[Self::daily_index(model, post.blog, post.day, to)] += 1;
        self.blog_topic[post.blog * k_topics + from] -= 1;
        self.blog_topic[post.blog * k_topics + to] += 1;
    }

    /// Blocks whose interest set meets the topics blog `i` has posted on;
    /// only the all-topics block for a blog with no posts.
    pub fn candidate_blocks(&self, model: &Model, i: usize) -> Vec<usize> {
        let k_topics = model.n_topics();
        let used = &self.blog_topic[i * k_topics..(i + 1) * k_topics];
        let out: Vec<usize> = (0..model.catalog.len())
            .filter(|&b| model.catalog.topics(b).iter().any(|&k| used[k] > 0))
            .collect();
        if out.is_empty() {
            vec![model.catalog.all_topics()]
        } else {
            out
        }
    }

    /// Checks the incremental tables against a full recount.
    pub fn audit(&self, model: &Model) -> Result<(), String> {
        let z: Vec<Option<usize>> = self.z.iter().map(|&k| Some(k)).collect();
        self.counts.audit(model.corpus, &z)?;
        let (daily, blog_topic) = daily_tables(model, &self.z);
        if daily != self.daily {
            return Err("per-day blog topic counts differ from recount".into());
        }
        if blog_topic != self.blog_topic {
            return Err("per-blog topic totals differ from recount".into());
        }
        let mut sizes = vec![0u32; model.catalog.len()];
        for &b in &self.b {
            sizes[b] += 1;
        }
        if sizes != self.block_sizes {
            return Err("block sizes differ from block labels".into());
        }
        Ok(())
    }

    pub fn snapshot(&self, iteration: usize) -> Snapshot {
        Snapshot {
            iteration,
            z: self.z.clone(),
            b: self.b.clone(),
            pi: self.pi.clone(),
            rho: self.rho.clone(),
            events: self.events.clone(),
            psi: self.psi.clone(),
            theta: self.theta,
        }
    }

    /// `sum_i rho_i`
    pub fn total_rate(&self) -> f64 {
        self.rho.iter().sum()
    }

    /// `sum_t sum_k E_tk psi_k`
    pub fn event_mass(&self) -> f64 {
        self.events
            .iter()
            .zip(&self.psi)
            .map(|(row, psi)| row.iter().filter(|&&e| e).count() as f64 * psi)
            .sum()
    }

    /// Log-likelihood of the daily post counts of blog `i` given `pi_i` and
    /// `rho_i`, up to terms that do not depend on them.
    pub fn blog_post_loglik(&self, model: &Model, i: usize, pi: &[f64], rho: f64, event_mass: f64) -> f64 {
        let k_topics = model.n_topics();
        let horizon = model.horizon() as usize;
        let base = i * horizon * k_topics;
        let mut acc = 0.0;
        let mut total = 0u64;
        for t in 0..horizon {
            let row = &self.daily[base + t * k_topics..base + (t + 1) * k_topics];
            for (k, &c) in row.iter().enumerate() {
                if c > 0 {
                    let rate = pi[k] + if self.events[k][t] { self.psi[k] } else { 0.0 };
                    acc += c as f64 * rate.ln();
                    total += c as u64;
                }
            }
        }
        let pi_sum: f64 = pi.iter().sum();
        acc + total as f64 * rho.ln() - rho * (horizon as f64 * pi_sum + event_mass)
    }

    /// Full log-likelihood of every `D_kit` under the current state,
    /// including the factorial terms.
    pub fn post_count_loglik(&self, model: &Model) -> f64 {
        let k_topics = model.n_topics();
        let mut acc = 0.0;
        for i in 0..model.n_blogs() {
            for t in 1..=model.horizon() {
                for k in 0..k_topics {
                    let rate = self.rho[i]
                        * (self.pi[i][k] + if self.events[k][t as usize - 1] { self.psi[k] } else { 0.0 });
                    acc += dtn_core::math::ln_poisson_pmf(self.d(model, i, t, k) as u64, rate);
                }
            }
        }
        acc
    }
}

fn daily_tables(model: &Model, z: &[usize]) -> (Vec<u32>, Vec<u32>) {
    let k_topics = model.n_topics();
    let mut daily = vec![0u32; model.n_blogs() * model.horizon() as usize * k_topics];
    let mut blog_topic = vec![0u32; model.n_blogs() * k_topics];
    for (post, &k) in model.corpus.posts().iter().zip(z) {
        daily[SamplerState::daily_index(model, post.blog, post.day, k)] += 1;
        blog_topic[post.blog * k_topics + k] += 1;
    }
    (daily, blog_topic)
}
