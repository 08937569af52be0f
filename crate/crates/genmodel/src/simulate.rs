//! Forward simulation of posts, tokens and links.

use dtn_core::math::sample_dirichlet;
use dtn_core::{AdjacencyTensor, BlogIndex, Corpus, Error, ModelConfig, Post, Result, Vocabulary};
use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Bernoulli, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::blocks::{block_index, block_prior, BlockCatalog};
use crate::network::{sample_network, Coefficients};
use crate::topics::{sample_topic_chain, TopicChain};

/// Scenario settings that are not model hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// `I`
    pub n_blogs: usize,
    /// `T`
    pub horizon: u32,
    /// `|W|`
    pub vocab_size: usize,
    pub theta: Coefficients,
    /// Fixed event boosts; drawn from the gamma prior when absent.
    pub psi: Option<Vec<f64>>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n_blogs: 40,
            horizon: 100,
            vocab_size: 200,
            theta: [-4.0, 1.0, -0.2, 0.3, 0.3],
            psi: None,
        }
    }
}

impl Scenario {
    /// Consumes the scenario keys (`I`, `T`, `W`, `theta`, `psi`) of a
    /// `key=value` text and returns the remaining lines.
    pub fn apply_text(&mut self, text: &str) -> Result<String> {
        let mut rest = String::new();
        let mut errors = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let Some((k, v)) = line.split_once('=') else {
                rest.push_str(raw);
                rest.push('\n');
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let list = || -> std::result::Result<Vec<f64>, String> {
                v.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| format!("{k}: bad number {x:?}")))
                    .collect()
            };
            let res: std::result::Result<(), String> = match k {
                "I" => v.parse().map(|x| self.n_blogs = x).map_err(|_| format!("I: bad value {v:?}")),
                "T" => v.parse().map(|x| self.horizon = x).map_err(|_| format!("T: bad value {v:?}")),
                "W" => v.parse().map(|x| self.vocab_size = x).map_err(|_| format!("W: bad value {v:?}")),
                "theta" => list().and_then(|xs| {
                    <[f64; 5]>::try_from(xs)
                        .map(|t| self.theta = t)
                        .map_err(|_| "theta: expected 5 values".to_string())
                }),
                "psi" => list().map(|xs| self.psi = Some(xs)),
                _ => {
                    rest.push_str(raw);
                    rest.push('\n');
                    Ok(())
                }
            };
            if let Err(e) = res {
                errors.push(format!("line {}: {e}", n + 1));
            }
        }
        if errors.is_empty() {
            Ok(rest)
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn validate(&self, cfg: &ModelConfig) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if self.horizon < 1 {
            errs.push("T must be at least 1".into());
        }
        if self.vocab_size < 1 {
            errs.push("W must be at least 1".into());
        }
        if let Some(psi) = &self.psi {
            if psi.len() != cfg.topics && psi.len() != 1 {
                errs.push(format!("psi must have 1 or K={} values", cfg.topics));
            }
            if psi.iter().any(|&p| !(p >= 0.0)) {
                errs.push("psi must be non-negative".into());
            }
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            errs.push("theta must be finite".into());
        }
        if block_prior(&cfg.block_scheme).is_none() {
            errs.push(format!("unknown p_B scheme {:?}", cfg.block_scheme));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// Expected number of posts on topic `k` by blog `i` on day `t`.
pub fn post_rate(rho: f64, pi_k: f64, event: bool, psi_k: f64) -> f64 {
    rho * pi_k + rho * if event { psi_k } else { 0.0 }
}

/// `E[k][t - 1] ~ Bernoulli(eta_k)`.
pub fn sample_events<R: Rng + ?Sized>(eta: &[f64], horizon: u32, rng: &mut R) -> Vec<Vec<bool>> {
    eta.iter()
        .map(|&p| {
            let d = Bernoulli::new(p).expect("eta in [0, 1]");
            (0..horizon).map(|_| d.sample(rng)).collect()
        })
        .collect()
}

/// Gamma(shape, rate) draw, used for both `psi_k` and `rho_i`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0 / rate).expect("positive gamma parameters").sample(rng)
}

pub fn sample_psi<R: Rng + ?Sized>(n_topics: usize, shape: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    (0..n_topics).map(|_| sample_gamma(shape, rate, rng)).collect()
}

pub fn sample_rho<R: Rng + ?Sized>(n_blogs: usize, shape: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    (0..n_blogs).map(|_| sample_gamma(shape, rate, rng)).collect()
}

fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u32
}

/// Every latent quantity of the generative model.
#[derive(Debug, Clone)]
pub struct LatentState {
    pub catalog: BlockCatalog,
    pub chain: TopicChain,
    /// `events[k][t - 1]`
    pub events: Vec<Vec<bool>>,
    pub psi: Vec<f64>,
    pub blocks: Vec<usize>,
    pub pi: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub theta: Coefficients,
}

impl LatentState {
    pub fn rate(&self, t: u32, k: usize, i: usize) -> f64 {
        post_rate(self.rho[i], self.pi[i][k], self.events[k][t as usize - 1], self.psi[k])
    }
}

pub fn sample_latent<R: Rng + ?Sized>(
    cfg: &ModelConfig,
    scenario: &Scenario,
    rng: &mut R,
) -> Result<LatentState> {
    cfg.validate()
        .and_then(|_| scenario.validate(cfg))
        .map_err(Error::Config)?;
    let k = cfg.topics;
    let catalog = block_index(k);
    let chain = sample_topic_chain(k, scenario.vocab_size, scenario.horizon, cfg.ell, cfg.beta, rng);
    let eta: Vec<f64> = (0..k).map(|c| cfg.eta(c)).collect();
    let events = sample_events(&eta, scenario.horizon, rng);
    let psi = match &scenario.psi {
        Some(p) if p.len() == 1 => vec![p[0]; k],
        Some(p) => p.clone(),
        None => sample_psi(k, cfg.psi_shape, cfg.psi_rate, rng),
    };
    let p_b = block_prior(&cfg.block_scheme)
        .expect("validated scheme")
        .probabilities(&catalog);
    let pick = WeightedIndex::new(&p_b).expect("block probabilities");
    let blocks: Vec<usize> = (0..scenario.n_blogs).map(|_| pick.sample(rng)).collect();
    let pi = blocks
        .iter()
        .map(|&b| sample_dirichlet(&catalog.interest_prior(b, cfg.interest_concentration), rng))
        .collect();
    let rho = sample_rho(scenario.n_blogs, cfg.rho_shape, cfg.rho_rate, rng);
    Ok(LatentState {
        catalog,
        chain,
        events,
        psi,
        blocks,
        pi,
        rho,
        theta: scenario.theta,
    })
}

/// Draws post counts and token counts. Posts are ordered by day, then blog,
/// then topic; each carries its true topic.
pub fn sample_posts_and_tokens<R: Rng + ?Sized>(
    state: &LatentState,
    tokens_per_post: f64,
    rng: &mut R,
) -> Result<Corpus> {
    if !(tokens_per_post > 0.0) {
        return Err(Error::Config(vec!["lambda_D must be positive".into()]));
    }
    let n_blogs = state.blocks.len();
    let k = state.chain.n_topics();
    let horizon = state.chain.horizon();
    let vocab_size = state.chain.vocab_size();
    let mut posts = Vec::new();
    for t in 1..=horizon {
        let samplers: Vec<WeightedIndex<f64>> = (0..k)
            .map(|c| WeightedIndex::new(state.chain.row(c, t)).expect("topic row on simplex"))
            .collect();
        for i in 0..n_blogs {
            for (c, sampler) in samplers.iter().enumerate() {
                let n_posts = sample_poisson(state.rate(t, c, i), rng);
                for _ in 0..n_posts {
                    let n_tokens = sample_poisson(tokens_per_post, rng);
                    let mut counts = vec![0u32; vocab_size];
                    for _ in 0..n_tokens {
                        counts[sampler.sample(rng)] += 1;
                    }
                    let pairs = counts
                        .iter()
                        .enumerate()
                        .filter(|(_, &n)| n > 0)
                        .map(|(w, &n)| (w as u32, n));
                    posts.push(Post::new(i, t, pairs).with_topic(c));
                }
            }
        }
    }
    let vocab = Vocabulary::from_tokens((0..vocab_size).map(|w| format!("w{w}")))?;
    Corpus::new(posts, vocab, BlogIndex::numbered(n_blogs), horizon)
}

/// Ground truth written next to a simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub blogs: Vec<String>,
    pub z: Vec<usize>,
    pub b: Vec<usize>,
    /// Interest set of each blog's block.
    pub block_topics: Vec<Vec<usize>>,
    pub pi: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub events: Vec<Vec<u8>>,
    pub psi: Vec<f64>,
    pub theta: Coefficients,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub corpus: Corpus,
    pub adjacency: AdjacencyTensor,
    pub latent: LatentState,
}

impl Simulation {
    pub fn truth(&self) -> GroundTruth {
        let l = &self.latent;
        GroundTruth {
            blogs: self.corpus.blogs().names().to_vec(),
            z: self.corpus.topics().expect("simulated posts carry topics"),
            b: l.blocks.clone(),
            block_topics: l.blocks.iter().map(|&b| l.catalog.topics(b).to_vec()).collect(),
            pi: l.pi.clone(),
            rho: l.rho.clone(),
            events: l
                .events
                .iter()
                .map(|row| row.iter().map(|&e| e as u8).collect())
                .collect(),
            psi: l.psi.clone(),
            theta: l.theta,
        }
    }
}

/// Runs the whole generative process.
pub fn simulate<R: Rng + ?Sized>(cfg: &ModelConfig, scenario: &Scenario, rng: &mut R) -> Result<Simulation> {
    let latent = sample_latent(cfg, scenario, rng)?;
    let corpus = sample_posts_and_tokens(&latent, cfg.tokens_per_post, rng)?;
    let adjacency = sample_network(&latent.blocks, &latent.pi, &latent.theta, scenario.horizon, rng);
    Ok(Simulation {
        corpus,
        adjacency,
        latent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dtn_core::seeded_rng;

    fn small_cfg() -> ModelConfig {
        ModelConfig {
            topics: 3,
            ell: 5,
            ..Default::default()
        }
    }

    #[test]
    fn post_rate_cases() {
        assert_eq!(post_rate(2.0, 0.5, false, 123.0), 1.0);
        assert!((post_rate(2.0, 0.5, true, 0.4) - 1.8).abs() < 1e-15);
        assert_eq!(post_rate(0.0, 0.3, true, 0.7), 0.0);
    }

    #[test]
    fn event_extremes() {
        let mut rng = seeded_rng(1);
        let e = sample_events(&[0.0, 1.0], 50, &mut rng);
        assert!(e[0].iter().all(|x| !x));
        assert!(e[1].iter().all(|&x| x));
    }

    #[test]
    fn event_rate_within_binomial_band() {
        let mut rng = seeded_rng(2);
        let eta = 0.01;
        let e = sample_events(&vec![eta; 100], 100, &mut rng);
        let n = 10_000.0;
        let hits = e.iter().flatten().filter(|&&x| x).count() as f64;
        let sd = (n * eta * (1.0 - eta)).sqrt();
        assert!((hits - n * eta).abs() <= 3.0 * sd, "{hits}");
    }

    #[test]
    fn zero_rates_give_empty_corpus() {
        let mut rng = seeded_rng(3);
        let mut state = sample_latent(&small_cfg(), &Scenario { n_blogs: 5, horizon: 10, vocab_size: 8, ..Default::default() }, &mut rng).unwrap();
        state.rho = vec![0.0; 5];
        let corpus = sample_posts_and_tokens(&state, 10.0, &mut rng).unwrap();
        assert!(corpus.posts().is_empty());
    }

    #[test]
    fn nonpositive_token_rate_is_config_error() {
        let mut rng = seeded_rng(3);
        let state = sample_latent(&small_cfg(), &Scenario { n_blogs: 2, horizon: 2, vocab_size: 4, ..Default::default() }, &mut rng).unwrap();
        assert!(matches!(sample_posts_and_tokens(&state, 0.0, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn point_mass_topic_emits_single_token() {
        let mut rng = seeded_rng(4);
        let mut state = sample_latent(&small_cfg(), &Scenario { n_blogs: 4, horizon: 3, vocab_size: 6, ..Default::default() }, &mut rng).unwrap();
        let mut rows = Vec::new();
        for _t in 0..3 {
            for _k in 0..3 {
                rows.push(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
            }
        }
        state.chain = TopicChain::from_rows(3, rows);
        let corpus = sample_posts_and_tokens(&state, 8.0, &mut rng).unwrap();
        assert!(!corpus.posts().is_empty());
        for p in corpus.posts() {
            assert!(p.tokens.iter().all(|&(w, _)| w == 2));
        }
    }

    #[test]
    fn post_counts_match_rates_on_average() {
        // rates are fixed; replicate the post draw many times
        let mut rng = seeded_rng(5);
        let state = sample_latent(&small_cfg(), &Scenario { n_blogs: 3, horizon: 4, vocab_size: 5, ..Default::default() }, &mut rng).unwrap();
        let reps = 4000;
        let mut sums = vec![0f64; 4 * 3 * 3];
        for _ in 0..reps {
            let corpus = sample_posts_and_tokens(&state, 1.0, &mut rng).unwrap();
            for p in corpus.posts() {
                sums[((p.day as usize - 1) * 3 + p.topic.unwrap()) * 3 + p.blog] += 1.0;
            }
        }
        for t in 1..=4u32 {
            for k in 0..3 {
                for i in 0..3 {
                    let lambda = state.rate(t, k, i);
                    let mean = sums[((t as usize - 1) * 3 + k) * 3 + i] / reps as f64;
                    let se = (lambda / reps as f64).sqrt();
                    assert!((mean - lambda).abs() <= 4.0 * se + 1e-12, "{mean} vs {lambda}");
                }
            }
        }
    }

    #[test]
    fn interest_means_match_dirichlet_mean() {
        // P = 50, two topics of interest out of K = 5: E[pi_k] = 50 / (100 + 3)
        let mut rng = seeded_rng(6);
        let cat = block_index(5);
        let alpha = cat.interest_prior(5, 50.0);
        assert_eq!(cat.topics(5), &[0, 1]);
        let n = 20_000;
        let mut mean = 0.0;
        for _ in 0..n {
            let pi = sample_dirichlet(&alpha, &mut rng);
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            mean += pi[0] / n as f64;
        }
        assert!((mean - 50.0 / 103.0).abs() < 0.003, "{mean}");
    }

    #[test]
    fn same_seed_same_simulation() {
        let scenario = Scenario { n_blogs: 6, horizon: 12, vocab_size: 20, ..Default::default() };
        let a = simulate(&small_cfg(), &scenario, &mut seeded_rng(8)).unwrap();
        let b = simulate(&small_cfg(), &scenario, &mut seeded_rng(8)).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.adjacency, b.adjacency);
        assert_eq!(a.truth(), b.truth());
    }

    #[test]
    fn scenario_keys_are_split_off() {
        let mut s = Scenario::default();
        let rest = s.apply_text("I=12\nK=3\ntheta=-1,0,0,0,0\npsi=0.5\n").unwrap();
        assert_eq!(s.n_blogs, 12);
        assert_eq!(s.theta, [-1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.psi, Some(vec![0.5]));
        assert_eq!(rest.trim(), "K=3");
    }
}
